#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace complseg {

// Ordered set of foreground class names. The background is not a trainable
// channel; it only exists as a reserved id at decode time.
class ClassCatalog {
public:
    explicit ClassCatalog(std::vector<std::string> classes);
    ClassCatalog(std::vector<std::string> classes, int background_id);

    int n_classes() const { return static_cast<int>(classes_.size()); }
    const std::vector<std::string>& classes() const { return classes_; }
    const std::string& name(int index) const { return classes_.at(static_cast<size_t>(index)); }
    int background_id() const { return background_id_; }

    std::optional<int> index_of(const std::string& name) const;
    bool contains(const std::string& name) const { return index_of(name).has_value(); }

    // Stable content hash; checkpoints refuse to load against a different catalog.
    uint64_t hash() const;

    bool operator==(const ClassCatalog& o) const {
        return classes_ == o.classes_ && background_id_ == o.background_id_;
    }

private:
    std::vector<std::string> classes_;
    int background_id_;
};

} // namespace complseg
