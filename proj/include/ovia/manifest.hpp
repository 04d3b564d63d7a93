#pragma once

#include <optional>
#include <string>
#include <vector>

namespace ovia {

struct ManifestOocyte {
    int cx = 0;
    int cy = 0;
    bool viable = false;
};

struct ManifestEntry {
    std::string image_path;  // resolved against the manifest's directory
    std::string mask_path;
    std::vector<ManifestOocyte> oocytes;  // expert labels + approximate centers
    std::optional<int> true_viable_count;
    std::string id;  // image path stem, used as the image id in reports
};

/// Dataset index. JSON schema:
/// {"entries":[{"image":"...","mask":"...",
///   "oocytes":[{"cx":int,"cy":int,"viable":bool}],
///   "true_viable_count":int|null}]}
struct Manifest {
    std::vector<ManifestEntry> entries;
};

/// Loads and validates a manifest; referenced files must exist, and
/// true_viable_count must be >= 0 and <= the number of listed oocytes.
/// Throws MissingFile / InvalidManifest.
Manifest load_manifest(const std::string& path);

/// Paths are written as given (the synth writer uses paths relative to the
/// manifest's directory).
void save_manifest(const Manifest& manifest, const std::string& path);

}  // namespace ovia
