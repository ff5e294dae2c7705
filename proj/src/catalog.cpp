#include "complseg/catalog.hpp"

#include <unordered_set>

#include "complseg/errors.hpp"

namespace complseg {

ClassCatalog::ClassCatalog(std::vector<std::string> classes)
    : ClassCatalog(std::move(classes), -1) {
    background_id_ = n_classes();
}

ClassCatalog::ClassCatalog(std::vector<std::string> classes, int background_id)
    : classes_(std::move(classes)), background_id_(background_id) {
    if (classes_.empty()) throw SchemaError("catalog needs at least one class");
    std::unordered_set<std::string> seen;
    for (const auto& name : classes_) {
        if (name.empty()) throw SchemaError("catalog class name must be non-empty");
        if (!seen.insert(name).second) throw SchemaError("duplicate catalog class '" + name + "'");
    }
    if (background_id_ >= 0 && background_id_ < n_classes())
        throw SchemaError("background id collides with a class channel index");
}

std::optional<int> ClassCatalog::index_of(const std::string& name) const {
    for (size_t i = 0; i < classes_.size(); ++i)
        if (classes_[i] == name) return static_cast<int>(i);
    return std::nullopt;
}

uint64_t ClassCatalog::hash() const {
    // FNV-1a over names and background id
    uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const char* s, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            h ^= static_cast<uint64_t>(static_cast<unsigned char>(s[i]));
            h *= 1099511628211ull;
        }
    };
    for (const auto& name : classes_) {
        mix(name.data(), name.size());
        mix("\x1f", 1);
    }
    std::string bg = std::to_string(background_id_);
    mix(bg.data(), bg.size());
    return h;
}

} // namespace complseg
