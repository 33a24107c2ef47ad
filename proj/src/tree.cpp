#include "syntaxprobe/tree.hpp"

#include <algorithm>
#include <fstream>

#include "syntaxprobe/error.hpp"

namespace syntaxprobe {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_delim(char c) { return is_space(c) || c == '(' || c == ')'; }

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Tree parse() {
    skip_space();
    if (at_end()) throw Error(Errc::EmptyInput, "no bracketing found");
    if (peek() == ')')
      throw Error(Errc::UnbalancedBrackets, where("')' before any '('"));
    if (peek() != '(')
      throw Error(Errc::UnexpectedToken, where("expected '('"));

    // Explicit stack so very deep unary chains cannot exhaust the call stack.
    std::vector<Tree> open;
    std::optional<Tree> root;
    while (!root) {
      skip_space();
      if (at_end())
        throw Error(Errc::UnbalancedBrackets,
                    std::to_string(open.size()) + " bracket(s) left open");
      const char c = peek();
      if (c == '(') {
        ++pos_;
        if (!open.empty() && open.back().terminal)
          throw Error(Errc::UnexpectedToken,
                      where("bracketing after a bare token"));
        if (at_end() || is_delim(peek()))
          throw Error(Errc::EmptyLabel, where("'(' without a label"));
        Tree node;
        node.label = read_atom();
        open.push_back(std::move(node));
      } else if (c == ')') {
        ++pos_;
        Tree done = std::move(open.back());
        open.pop_back();
        if (open.empty())
          root = std::move(done);
        else
          open.back().children.push_back(std::move(done));
      } else {
        Tree& node = open.back();
        if (node.terminal || !node.children.empty())
          throw Error(Errc::UnexpectedToken,
                      where("node '" + node.label +
                            "' mixes tokens and bracketings"));
        node.terminal = read_atom();
      }
    }

    skip_space();
    if (!at_end()) {
      if (peek() == ')')
        throw Error(Errc::UnbalancedBrackets, where("unmatched ')'"));
      throw Error(Errc::TrailingContent, where("content after root closes"));
    }
    return std::move(*root);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_space() {
    while (!at_end() && is_space(peek())) ++pos_;
  }

  std::string read_atom() {
    const std::size_t begin = pos_;
    while (!at_end() && !is_delim(peek())) ++pos_;
    return std::string(text_.substr(begin, pos_ - begin));
  }

  std::string where(const std::string& msg) const {
    return msg + " at offset " + std::to_string(pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void serialize_into(const Tree& t, std::string& out) {
  out += '(';
  out += t.label;
  if (t.terminal) {
    out += ' ';
    out += *t.terminal;
  }
  for (const Tree& c : t.children) {
    out += ' ';
    serialize_into(c, out);
  }
  out += ')';
}

void collect_yield(const Tree& t, std::vector<std::string>& out) {
  if (t.terminal) out.push_back(*t.terminal);
  for (const Tree& c : t.children) collect_yield(c, out);
}

void collect_productions(const Tree& t, std::vector<Production>& out) {
  if (t.children.empty()) return;
  Production p;
  p.parent = t.label;
  p.children.reserve(t.children.size());
  for (const Tree& c : t.children) p.children.push_back(c.label);
  out.push_back(std::move(p));
  for (const Tree& c : t.children) collect_productions(c, out);
}

}  // namespace

Tree parse_ptb(std::string_view text) { return Parser(text).parse(); }

std::string serialize(const Tree& tree) {
  std::string out;
  serialize_into(tree, out);
  return out;
}

std::size_t node_count(const Tree& tree) {
  std::size_t n = 1;
  for (const Tree& c : tree.children) n += node_count(c);
  return n;
}

std::size_t terminal_count(const Tree& tree) {
  std::size_t n = tree.terminal ? 1 : 0;
  for (const Tree& c : tree.children) n += terminal_count(c);
  return n;
}

std::size_t internal_node_count(const Tree& tree) {
  if (tree.children.empty()) return 0;
  std::size_t n = 1;
  for (const Tree& c : tree.children) n += internal_node_count(c);
  return n;
}

std::vector<std::string> yield(const Tree& tree) {
  std::vector<std::string> out;
  collect_yield(tree, out);
  return out;
}

std::size_t tree_depth(const Tree& tree) {
  std::size_t deepest = 0;
  for (const Tree& c : tree.children) deepest = std::max(deepest, tree_depth(c));
  return deepest + 1;
}

Tree delexicalize(const Tree& tree) {
  Tree out;
  out.label = tree.label;
  out.children.reserve(tree.children.size());
  for (const Tree& c : tree.children) out.children.push_back(delexicalize(c));
  return out;
}

bool is_lexicalized(const Tree& tree) {
  if (tree.terminal) return true;
  return std::any_of(tree.children.begin(), tree.children.end(),
                     [](const Tree& c) { return is_lexicalized(c); });
}

std::vector<Production> productions(const Tree& tree) {
  std::vector<Production> out;
  collect_productions(tree, out);
  return out;
}

std::vector<Tree> read_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open tree file " + path);
  std::vector<Tree> trees;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos)
      throw Error(Errc::BadFormat,
                  path + ":" + std::to_string(lineno) + ": blank line");
    try {
      trees.push_back(parse_ptb(line));
    } catch (const Error& e) {
      throw Error(e.code(), path + ":" + std::to_string(lineno) + ": " +
                                e.what());
    }
  }
  return trees;
}

void write_tree_file(const std::string& path, const std::vector<Tree>& trees) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write tree file " + path);
  for (const Tree& t : trees) out << serialize(t) << '\n';
}

}  // namespace syntaxprobe
