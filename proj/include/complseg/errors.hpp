#pragma once

#include <stdexcept>
#include <string>

namespace complseg {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ShapeMismatchError : public Error {
public:
    explicit ShapeMismatchError(const std::string& msg) : Error("shape mismatch: " + msg) {}
};

// Two classes claim the same positive pixel in one frame.
class OverlappingPositivesError : public Error {
public:
    OverlappingPositivesError(std::string class_a, std::string class_b, int y, int x)
        : Error("overlapping positives: classes '" + class_a + "' and '" + class_b +
                "' both positive at pixel (" + std::to_string(y) + "," + std::to_string(x) + ")"),
          class_a(std::move(class_a)), class_b(std::move(class_b)), y(y), x(x) {}
    std::string class_a;
    std::string class_b;
    int y;
    int x;
};

class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& msg) : Error("schema error: " + msg) {}
};

class MissingFileError : public Error {
public:
    explicit MissingFileError(const std::string& path)
        : Error("missing file: " + path), path(path) {}
    std::string path;
};

class NotFullyLabeledError : public Error {
public:
    explicit NotFullyLabeledError(const std::string& msg)
        : Error("not fully labeled: " + msg) {}
};

class EmptySplitError : public Error {
public:
    explicit EmptySplitError(const std::string& split)
        : Error("empty split: " + split) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

class NoPositivesError : public Error {
public:
    explicit NoPositivesError(const std::string& class_name)
        : Error("no positive pixels for class '" + class_name + "'"), class_name(class_name) {}
    std::string class_name;
};

class TooFewPairsError : public Error {
public:
    explicit TooFewPairsError(int n)
        : Error("too few pairs after zero-difference removal: " + std::to_string(n)), n(n) {}
    int n;
};

class CorruptCheckpointError : public Error {
public:
    explicit CorruptCheckpointError(const std::string& msg)
        : Error("corrupt checkpoint: " + msg) {}
};

class MissingSubsetError : public Error {
public:
    explicit MissingSubsetError(const std::string& class_name)
        : Error("no subset provides class '" + class_name + "'"), class_name(class_name) {}
    std::string class_name;
};

class IncompleteBundleError : public Error {
public:
    explicit IncompleteBundleError(const std::string& msg)
        : Error("incomplete ensemble bundle: " + msg) {}
};

class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& msg) : Error("empty input: " + msg) {}
};

} // namespace complseg
