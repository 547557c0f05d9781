#include <cctype>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "dualgraph/amr_graph.hpp"
#include "dualgraph/errors.hpp"

namespace dualgraph {
namespace {

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')';
}

// Single lowercase letter plus optional digits: the shape AMR uses for
// variables. An atom of this shape that is never defined is an error
// rather than a constant.
bool looks_like_variable(std::string_view atom) {
  if (atom.empty() || !std::islower(static_cast<unsigned char>(atom[0]))) return false;
  for (std::size_t i = 1; i < atom.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(atom[i]))) return false;
  }
  return true;
}

class PenmanParser {
 public:
  explicit PenmanParser(std::string_view text) : text_(text) {}

  AmrGraph parse() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("empty PENMAN input", pos_);
    collect_variables();
    const int root = parse_graph();
    skip_space();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError("trailing content after graph", pos_);
    }
    patch_forward();
    return AmrGraph(std::move(nodes_), std::move(edges_), root);
  }

 private:
  // Pre-scan so that a variable may be referenced before its definition.
  void collect_variables() {
    std::size_t p = pos_;
    while (p < text_.size()) {
      const char c = text_[p];
      if (c == '"') {
        p = skip_quoted(p);
        continue;
      }
      ++p;
      if (c != '(') continue;
      while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
      const std::size_t start = p;
      while (p < text_.size() && !is_delimiter(text_[p]) && text_[p] != '/') ++p;
      if (p > start) defined_.insert(std::string(text_.substr(start, p - start)));
    }
  }

  std::size_t skip_quoted(std::size_t p) const {
    const std::size_t open = p++;
    while (p < text_.size() && text_[p] != '"') {
      if (text_[p] == '\\') ++p;
      ++p;
    }
    if (p >= text_.size()) throw ParseError("unterminated string", open);
    return p + 1;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_token() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string read_quoted() {
    const std::size_t open = pos_;
    const std::size_t end = skip_quoted(pos_);
    std::string out;
    for (std::size_t p = open + 1; p + 1 < end; ++p) {
      if (text_[p] == '\\' && p + 2 < end) ++p;
      out.push_back(text_[p]);
    }
    pos_ = end;
    return out;
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size()) {
      throw ParseError(std::string("unbalanced parentheses: expected '") + c + "'", pos_);
    }
    if (text_[pos_] != c) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  int add_node(std::string variable, std::string label) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.push_back(AmrNode{id, std::move(variable), std::move(label)});
    return id;
  }

  int parse_graph() {
    expect('(');
    skip_space();
    const std::size_t var_offset = pos_;
    std::string variable = read_token();
    // `(v/concept)` without spaces
    std::string label;
    if (const auto slash = variable.find('/'); slash != std::string::npos) {
      label = variable.substr(slash + 1);
      variable.resize(slash);
      if (label.empty()) {
        skip_space();
        label = read_atom_text();
      }
    } else {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unbalanced parentheses: expected '/'", pos_);
      if (text_[pos_] != '/') throw ParseError("expected '/' after variable", pos_);
      ++pos_;
      skip_space();
      label = read_atom_text();
    }
    if (variable.empty()) throw ParseError("missing variable", var_offset);
    if (label.empty()) throw ParseError("missing concept", pos_);
    if (!variables_.emplace(variable, static_cast<int>(nodes_.size())).second) {
      throw ParseError("duplicate variable '" + variable + "'", var_offset);
    }
    const int id = add_node(variable, label);

    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unbalanced parentheses: expected ')'", pos_);
      if (text_[pos_] == ')') {
        ++pos_;
        return id;
      }
      if (text_[pos_] != ':') throw ParseError("expected relation", pos_);
      const std::size_t role_offset = pos_;
      std::string relation = read_token();
      if (relation.size() < 2) throw ParseError("empty relation", role_offset);
      skip_space();
      if (pos_ >= text_.size()) throw ParseError("unbalanced parentheses: missing value", pos_);
      if (text_[pos_] == ')') throw ParseError("relation without value", pos_);

      // Edge goes in before the child's own edges so that edge order is
      // textual order.
      const std::size_t edge_index = edges_.size();
      edges_.push_back(AmrEdge{id, std::move(relation), -1});
      int target = -1;
      if (text_[pos_] == '(') {
        target = parse_graph();
      } else {
        target = parse_atom();
      }
      edges_[edge_index].target = target;
    }
  }

  std::string read_atom_text() {
    if (pos_ < text_.size() && text_[pos_] == '"') return read_quoted();
    return read_token();
  }

  int parse_atom() {
    const std::size_t offset = pos_;
    if (text_[pos_] == '"') return add_node("", read_quoted());
    std::string atom = read_token();
    if (atom.empty()) throw ParseError("expected value", offset);
    if (defined_.count(atom)) {
      if (auto it = variables_.find(atom); it != variables_.end()) return it->second;
      // Defined later in the text; resolved once that definition is seen.
      return resolve_forward(atom, offset);
    }
    if (looks_like_variable(atom)) {
      throw ParseError("undefined variable '" + atom + "'", offset);
    }
    return add_node("", std::move(atom));
  }

  // The target of a forward reference is patched once the whole graph has
  // been read.
  int resolve_forward(const std::string& variable, std::size_t offset) {
    forward_.push_back({edges_.size() - 1, variable, offset});
    return -1;
  }

  void patch_forward() {
    for (const auto& f : forward_) {
      auto it = variables_.find(f.variable);
      if (it == variables_.end()) throw ParseError("undefined variable '" + f.variable + "'", f.offset);
      edges_[f.edge].target = it->second;
    }
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<AmrNode> nodes_;
  std::vector<AmrEdge> edges_;
  std::unordered_set<std::string> defined_;
  std::unordered_map<std::string, int> variables_;

  struct Forward {
    std::size_t edge;
    std::string variable;
    std::size_t offset;
  };
  std::vector<Forward> forward_;
};

}  // namespace

AmrGraph parse_penman(std::string_view text) { return PenmanParser(text).parse(); }

}  // namespace dualgraph
