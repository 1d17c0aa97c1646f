#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace graypatch {

class dataset_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetEntry {
    std::string path; // relative to the dataset root, '/'-separated
    std::uint64_t ordinal = 0;
    std::optional<std::string> person_id;
    std::optional<std::string> camera_id;

    friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
};

struct ReidName {
    std::string person_id;
    std::string camera_id;
};

/// Parses `personId_cameraSeq_frame.ext` style names, e.g.
/// `0002_c1s1_000451_03.jpg` -> ("0002", "c1"). Returns nothing for
/// names outside the grammar (Market-1501 junk images such as `-1_c1...`).
inline std::optional<ReidName> parse_reid_name(const std::string& filename) {
    static const std::regex grammar(R"(^(\w+)_(c\d+)\S*\.(jpg|jpeg|png)$)");
    std::smatch m;
    if (!std::regex_match(filename, m, grammar)) return std::nullopt;
    return ReidName{m[1].str(), m[2].str()};
}

inline bool has_image_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

/// Sorts relative paths byte-wise and assigns ordinals in that order.
inline std::vector<DatasetEntry> make_entries(std::vector<std::string> relative_paths) {
    std::sort(relative_paths.begin(), relative_paths.end());
    relative_paths.erase(std::unique(relative_paths.begin(), relative_paths.end()), relative_paths.end());
    std::vector<DatasetEntry> entries;
    entries.reserve(relative_paths.size());
    for (std::size_t i = 0; i < relative_paths.size(); ++i) {
        DatasetEntry e;
        e.path = std::move(relative_paths[i]);
        e.ordinal = i;
        const auto slash = e.path.find_last_of('/');
        const std::string name = slash == std::string::npos ? e.path : e.path.substr(slash + 1);
        if (auto parsed = parse_reid_name(name)) {
            e.person_id = std::move(parsed->person_id);
            e.camera_id = std::move(parsed->camera_id);
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

struct DatasetListing {
    std::vector<DatasetEntry> entries;
    std::vector<std::string> problems; // unreadable directories or files, walk continues past them
};

namespace detail {

inline void collect_images(const std::filesystem::path& root, const std::filesystem::path& dir,
                           std::vector<std::string>& found, std::vector<std::string>& problems) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::directory_iterator it(dir, ec);
    if (ec) {
        problems.push_back(dir.string() + ": " + ec.message());
        return;
    }
    for (const fs::directory_iterator end; it != end; it.increment(ec)) {
        if (ec) {
            problems.push_back(dir.string() + ": " + ec.message());
            break;
        }
        const auto& entry = *it;
        std::error_code sec;
        const auto status = entry.symlink_status(sec);
        if (sec) {
            problems.push_back(entry.path().string() + ": " + sec.message());
            continue;
        }
        if (fs::is_directory(status)) {
            collect_images(root, entry.path(), found, problems);
        } else if (has_image_extension(entry.path()) && fs::is_regular_file(entry.status(sec))) {
            found.push_back(entry.path().lexically_relative(root).generic_string());
        }
    }
}

} // namespace detail

/// Recursively lists PNG/JPEG files under `root` in byte-wise path order.
/// Directory symlinks are not followed.
inline DatasetListing walk_dataset(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw dataset_error("dataset root '" + root.string() + "' is not a readable directory");
    }
    if (fs::directory_iterator probe(root, ec); ec) {
        throw dataset_error("cannot read dataset root '" + root.string() + "': " + ec.message());
    }
    std::vector<std::string> found;
    DatasetListing listing;
    detail::collect_images(root, root, found, listing.problems);
    listing.entries = make_entries(std::move(found));
    return listing;
}

} // namespace graypatch
