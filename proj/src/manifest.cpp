#include "ovia/manifest.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ovia/errors.hpp"

namespace ovia {

namespace fs = std::filesystem;

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw MissingFile("cannot open manifest: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidManifest("manifest is not valid JSON: " + path + " (" + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
        throw InvalidManifest("manifest must be an object with an 'entries' array: " + path);
    }

    const fs::path base = fs::path(path).parent_path();
    Manifest manifest;
    for (const auto& item : doc["entries"]) {
        ManifestEntry entry;
        try {
            entry.image_path = (base / item.at("image").get<std::string>()).string();
            entry.mask_path = (base / item.at("mask").get<std::string>()).string();
            for (const auto& oo : item.at("oocytes")) {
                ManifestOocyte oocyte;
                oocyte.cx = oo.at("cx").get<int>();
                oocyte.cy = oo.at("cy").get<int>();
                oocyte.viable = oo.at("viable").get<bool>();
                entry.oocytes.push_back(oocyte);
            }
            if (item.contains("true_viable_count") && !item["true_viable_count"].is_null()) {
                entry.true_viable_count = item["true_viable_count"].get<int>();
            }
        } catch (const nlohmann::json::exception& e) {
            throw InvalidManifest("bad manifest entry in " + path + ": " + e.what());
        }
        if (!fs::exists(entry.image_path)) {
            throw MissingFile("manifest references missing image: " + entry.image_path);
        }
        if (!fs::exists(entry.mask_path)) {
            throw MissingFile("manifest references missing mask: " + entry.mask_path);
        }
        if (entry.true_viable_count) {
            if (*entry.true_viable_count < 0) {
                throw InvalidManifest("true_viable_count must be >= 0");
            }
            if (*entry.true_viable_count > static_cast<int>(entry.oocytes.size())) {
                throw InvalidManifest("true_viable_count exceeds the listed oocyte count");
            }
        }
        entry.id = fs::path(item.at("image").get<std::string>()).parent_path().string();
        if (entry.id.empty()) {
            entry.id = fs::path(entry.image_path).stem().string();
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

void save_manifest(const Manifest& manifest, const std::string& path) {
    nlohmann::json entries = nlohmann::json::array();
    const fs::path base = fs::path(path).parent_path();
    for (const ManifestEntry& entry : manifest.entries) {
        nlohmann::json oocytes = nlohmann::json::array();
        for (const ManifestOocyte& oo : entry.oocytes) {
            oocytes.push_back({{"cx", oo.cx}, {"cy", oo.cy}, {"viable", oo.viable}});
        }
        nlohmann::json item;
        item["image"] = fs::path(entry.image_path).lexically_relative(base).string();
        item["mask"] = fs::path(entry.mask_path).lexically_relative(base).string();
        item["oocytes"] = std::move(oocytes);
        if (entry.true_viable_count) {
            item["true_viable_count"] = *entry.true_viable_count;
        } else {
            item["true_viable_count"] = nullptr;
        }
        entries.push_back(std::move(item));
    }
    nlohmann::json doc;
    doc["entries"] = std::move(entries);

    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoFailure("cannot open for writing: " + path);
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoFailure("write failed: " + path);
    }
}

}  // namespace ovia
