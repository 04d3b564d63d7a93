#include "ovia/pgm.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>

namespace ovia {

namespace {

// Reads the next header token, skipping whitespace and `#` comments.
bool next_token(std::istream& in, std::string& token) {
    token.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF) return false;
    while (c != EOF && !std::isspace(c) && c != '#') {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    return true;
}

bool parse_dim(const std::string& token, long& out) {
    if (token.empty()) return false;
    for (char ch : token) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    }
    try {
        out = std::stol(token);
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

struct RawPgm {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bytes;
};

RawPgm load_p5(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw MissingFile("no such file: " + path);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFile("cannot open: " + path);
    }

    std::string token;
    if (!next_token(in, token) || token != "P5") {
        throw MalformedHeader(path + ": expected binary PGM magic P5, got '" + token + "'");
    }
    long width = 0, height = 0, maxval = 0;
    if (!next_token(in, token) || !parse_dim(token, width) || width < 1) {
        throw MalformedHeader(path + ": bad width");
    }
    if (!next_token(in, token) || !parse_dim(token, height) || height < 1) {
        throw MalformedHeader(path + ": bad height");
    }
    if (!next_token(in, token) || !parse_dim(token, maxval) || maxval != 255) {
        throw MalformedHeader(path + ": maxval must be 255");
    }
    // Exactly one whitespace byte separates the header from the payload; the
    // token reader has already consumed it.

    RawPgm raw;
    raw.width = static_cast<int>(width);
    raw.height = static_cast<int>(height);
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    raw.bytes.resize(count);
    in.read(reinterpret_cast<char*>(raw.bytes.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
        throw TruncatedPayload(path + ": expected " + std::to_string(count) + " pixel bytes, got " +
                               std::to_string(in.gcount()));
    }
    return raw;
}

void save_p5(int width, int height, const std::vector<std::uint8_t>& bytes,
             const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path);
    }
    out << "P5\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
        throw IoFailure("write failed: " + path);
    }
}

}  // namespace

GrayImage load_gray_image(const std::string& path) {
    RawPgm raw = load_p5(path);
    GrayImage image;
    image.width = raw.width;
    image.height = raw.height;
    image.pixels = std::move(raw.bytes);
    return image;
}

LabelMask load_label_mask(const std::string& path) {
    RawPgm raw = load_p5(path);
    for (std::size_t i = 0; i < raw.bytes.size(); ++i) {
        if (raw.bytes[i] > kMaxLabel) {
            throw InvalidLabel(path + ": label " + std::to_string(raw.bytes[i]) + " at index " +
                               std::to_string(i) + " exceeds " + std::to_string(kMaxLabel));
        }
    }
    LabelMask mask;
    mask.width = raw.width;
    mask.height = raw.height;
    mask.labels = std::move(raw.bytes);
    return mask;
}

void save_gray_image(const GrayImage& image, const std::string& path) {
    save_p5(image.width, image.height, image.pixels, path);
}

void save_label_mask(const LabelMask& mask, const std::string& path) {
    save_p5(mask.width, mask.height, mask.labels, path);
}

}  // namespace ovia
