#pragma once

#include <stdexcept>
#include <string>

namespace mmot {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : Error {
    GridMismatch() : Error("fields are bound to different grids") {}
    explicit GridMismatch(const std::string& what) : Error(what) {}
};

struct AllZeroInput : Error {
    AllZeroInput() : Error("image has zero total intensity and no floor") {}
};

struct NonpositiveWeight : Error {
    NonpositiveWeight() : Error("cost weight must be positive") {}
};

struct DisconnectedGraph : Error {
    DisconnectedGraph() : Error("cost graph is not connected") {}
};

struct NotATree : Error {
    NotATree() : Error("graph is not a tree") {}
};

struct InvalidRoot : Error {
    explicit InvalidRoot(int r) : Error("invalid root node " + std::to_string(r)) {}
};

struct ChildNotReady : Error {
    explicit ChildNotReady(int node) : Error("net potential requested before children of node " + std::to_string(node)) {}
};

struct BadWeights : Error {
    explicit BadWeights(const std::string& what) : Error(what) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string& what) : Error(what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace mmot
