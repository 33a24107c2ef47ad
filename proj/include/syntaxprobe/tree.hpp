#ifndef SYNTAXPROBE_TREE_HPP
#define SYNTAXPROBE_TREE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace syntaxprobe {

// Rooted, labeled, ordered constituency tree. Word tokens are not nodes:
// they live in the `terminal` field of the preterminal leaf that covers
// them, so a lexicalized leaf is `(DT the)` and its delexicalized form is
// `(DT)`.
struct Tree {
  std::string label;
  std::vector<Tree> children;
  std::optional<std::string> terminal;

  bool is_leaf() const noexcept { return children.empty(); }

  friend bool operator==(const Tree&, const Tree&) = default;
};

// A parent label with its ordered child labels. Only internal nodes own a
// production.
struct Production {
  std::string parent;
  std::vector<std::string> children;

  friend bool operator==(const Production&, const Production&) = default;
  friend auto operator<=>(const Production&, const Production&) = default;
};

/// Parses one bracketed tree such as `(ROOT (S (NP (DT the)) ...))`.
///
/// A bare token becomes the terminal of its enclosing node; a node may hold
/// either nested bracketings or a single bare token, not both. Throws
/// Error with EmptyInput, UnbalancedBrackets, EmptyLabel, TrailingContent
/// or UnexpectedToken.
Tree parse_ptb(std::string_view text);

// Canonical single-space serialization; parse_ptb(serialize(t)) == t.
std::string serialize(const Tree& tree);

std::size_t node_count(const Tree& tree);
std::size_t terminal_count(const Tree& tree);
std::size_t internal_node_count(const Tree& tree);

// Terminal tokens in left-to-right order.
std::vector<std::string> yield(const Tree& tree);

/// Number of nodes on the longest root-to-leaf path, both ends included.
/// Terminals do not add a level, so depth is unchanged by delexicalize().
std::size_t tree_depth(const Tree& tree);

Tree delexicalize(const Tree& tree);
bool is_lexicalized(const Tree& tree);

// One production per internal node, in preorder.
std::vector<Production> productions(const Tree& tree);

// Reads a tree-per-line file. Blank lines are rejected with their line
// number.
std::vector<Tree> read_tree_file(const std::string& path);
void write_tree_file(const std::string& path, const std::vector<Tree>& trees);

}  // namespace syntaxprobe

#endif
