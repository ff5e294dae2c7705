#include "complseg/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "complseg/errors.hpp"
#include "complseg/raster.hpp"

namespace complseg {

using ordered_json = nlohmann::ordered_json;

const Subset* DatasetManifest::find_subset(const std::string& name) const {
    for (const auto& s : subsets)
        if (s.name == name) return &s;
    return nullptr;
}

namespace {

void validate_manifest(const DatasetManifest& m, bool check_files) {
    std::set<std::string> subset_names;
    for (const auto& subset : m.subsets) {
        if (subset.name.empty()) throw SchemaError("subset with empty name");
        if (!subset_names.insert(subset.name).second)
            throw SchemaError("duplicate subset '" + subset.name + "'");
        if (subset.annotated_classes.empty())
            throw SchemaError("subset '" + subset.name + "' annotates no classes");
        std::set<std::string> annotated;
        for (const auto& cls : subset.annotated_classes) {
            if (!m.catalog.contains(cls))
                throw SchemaError("subset '" + subset.name + "' annotates unknown class '" + cls + "'");
            if (!annotated.insert(cls).second)
                throw SchemaError("subset '" + subset.name + "' repeats class '" + cls + "'");
        }
        std::set<std::string> frame_ids;
        for (const auto& frame : subset.frames) {
            if (frame.id.empty()) throw SchemaError("frame with empty id in '" + subset.name + "'");
            if (!frame_ids.insert(frame.id).second)
                throw SchemaError("frame '" + frame.id + "' listed more than once in subset '" +
                                  subset.name + "' (splits must be disjoint)");
            if (std::find(kSplits.begin(), kSplits.end(), frame.split) == kSplits.end())
                throw SchemaError("frame '" + frame.id + "' has unknown split '" + frame.split + "'");
            for (const auto& [cls, path] : frame.mask_paths) {
                (void)path;
                if (!annotated.count(cls))
                    throw SchemaError("frame '" + frame.id + "' has mask for class '" + cls +
                                      "' outside subset '" + subset.name + "' annotated classes");
            }
            for (const auto& cls : subset.annotated_classes) {
                if (!frame.mask_paths.count(cls))
                    throw SchemaError("frame '" + frame.id + "' in subset '" + subset.name +
                                      "' misses a mask for annotated class '" + cls + "'");
            }
            if (check_files) {
                if (!std::filesystem::exists(m.resolve(frame.image_path)))
                    throw MissingFileError(m.resolve(frame.image_path).string());
                for (const auto& [cls, path] : frame.mask_paths) {
                    (void)cls;
                    if (!std::filesystem::exists(m.resolve(path)))
                        throw MissingFileError(m.resolve(path).string());
                }
            }
        }
    }
}

} // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingFileError(path.string());
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw SchemaError("manifest is not valid JSON: " + std::string(e.what()));
    }

    DatasetManifest m;
    m.root = path.parent_path();
    try {
        m.name = doc.at("name").get<std::string>();
        const auto& cat = doc.at("catalog");
        auto classes = cat.at("classes").get<std::vector<std::string>>();
        if (cat.contains("background_id"))
            m.catalog = ClassCatalog(classes, cat.at("background_id").get<int>());
        else
            m.catalog = ClassCatalog(std::move(classes));
        for (const auto& js : doc.at("subsets")) {
            Subset subset;
            subset.name = js.at("name").get<std::string>();
            subset.annotated_classes = js.at("annotated_classes").get<std::vector<std::string>>();
            for (const auto& jf : js.at("frames")) {
                FrameEntry f;
                f.id = jf.at("id").get<std::string>();
                f.split = jf.at("split").get<std::string>();
                f.image_path = jf.at("image").get<std::string>();
                for (const auto& [cls, p] : jf.at("masks").items())
                    f.mask_paths[cls] = p.get<std::string>();
                subset.frames.push_back(std::move(f));
            }
            m.subsets.push_back(std::move(subset));
        }
    } catch (const SchemaError&) {
        throw;
    } catch (const std::exception& e) {
        throw SchemaError(std::string(e.what()));
    }

    validate_manifest(m, /*check_files=*/true);
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    validate_manifest(manifest, /*check_files=*/false);
    ordered_json doc;
    doc["name"] = manifest.name;
    doc["catalog"] = {{"classes", manifest.catalog.classes()},
                      {"background_id", manifest.catalog.background_id()}};
    doc["subsets"] = ordered_json::array();
    for (const auto& subset : manifest.subsets) {
        ordered_json js;
        js["name"] = subset.name;
        js["annotated_classes"] = subset.annotated_classes;
        js["frames"] = ordered_json::array();
        for (const auto& frame : subset.frames) {
            ordered_json jf;
            jf["id"] = frame.id;
            jf["split"] = frame.split;
            jf["image"] = frame.image_path;
            jf["masks"] = frame.mask_paths;
            js["frames"].push_back(std::move(jf));
        }
        doc["subsets"].push_back(std::move(js));
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out << doc.dump(2) << "\n";
}

DatasetManifest split_full_to_binary(const DatasetManifest& manifest, BinarySplitMode mode) {
    const Subset* source = nullptr;
    for (const auto& subset : manifest.subsets) {
        bool full = subset.annotated_classes.size() ==
                    static_cast<size_t>(manifest.catalog.n_classes());
        if (full) {
            if (source) throw SchemaError("more than one fully-labeled subset; split is ambiguous");
            source = &subset;
        }
    }
    if (!source) throw NotFullyLabeledError("manifest has no subset annotating every catalog class");
    for (const auto& frame : source->frames)
        for (const auto& cls : manifest.catalog.classes())
            if (!frame.mask_paths.count(cls))
                throw NotFullyLabeledError("frame '" + frame.id + "' misses a mask for class '" +
                                           cls + "'");

    DatasetManifest out;
    out.name = manifest.name + "-binary";
    out.catalog = manifest.catalog;
    out.root = manifest.root;
    const int n = manifest.catalog.n_classes();
    for (int c = 0; c < n; ++c) {
        Subset subset;
        subset.name = manifest.catalog.name(c);
        subset.annotated_classes = {manifest.catalog.name(c)};
        out.subsets.push_back(std::move(subset));
    }
    // Partition deals frames round-robin per split so every subset keeps all
    // three splits populated.
    std::map<std::string, int> next_in_split;
    for (const auto& frame : source->frames) {
        if (mode == BinarySplitMode::Duplicate) {
            for (int c = 0; c < n; ++c) {
                FrameEntry f;
                f.id = frame.id;
                f.split = frame.split;
                f.image_path = frame.image_path;
                const std::string& cls = manifest.catalog.name(c);
                f.mask_paths[cls] = frame.mask_paths.at(cls);
                out.subsets[static_cast<size_t>(c)].frames.push_back(std::move(f));
            }
        } else {
            int c = next_in_split[frame.split]++ % n;
            FrameEntry f;
            f.id = frame.id;
            f.split = frame.split;
            f.image_path = frame.image_path;
            const std::string& cls = manifest.catalog.name(c);
            f.mask_paths[cls] = frame.mask_paths.at(cls);
            out.subsets[static_cast<size_t>(c)].frames.push_back(std::move(f));
        }
    }
    return out;
}

AnnotationFrame load_frame(const DatasetManifest& manifest, const Subset& subset,
                           const FrameEntry& entry) {
    AnnotationFrame frame;
    frame.image = read_image(manifest.resolve(entry.image_path));
    frame.annotated_classes = subset.annotated_classes;
    for (const auto& cls : subset.annotated_classes)
        frame.masks[cls] = read_mask(manifest.resolve(entry.mask_paths.at(cls)));
    return frame;
}

std::vector<FrameView> list_views(const DatasetManifest& manifest, const std::string& split) {
    std::vector<FrameView> views;
    for (const auto& subset : manifest.subsets)
        for (const auto& frame : subset.frames)
            if (frame.split == split) views.push_back({&subset, &frame});
    return views;
}

} // namespace complseg
