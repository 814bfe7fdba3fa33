#include "dal/proof_io.hpp"

#include <json.hpp>

#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dal/errors.hpp"
#include "dal/parser.hpp"
#include "dal/printer.hpp"

namespace dal {

namespace {

void write_node(std::ostream& os, const ProofNode& node, int& next_id) {
  int id = next_id++;
  std::vector<int> kid_ids;
  // Ids are assigned preorder; compute the children's ids by walking sizes.
  std::function<int(const ProofNode&)> size = [&](const ProofNode& n) {
    int s = 1;
    for (const auto& c : n.children) s += size(c);
    return s;
  };
  int cursor = id + 1;
  for (const auto& c : node.children) {
    kid_ids.push_back(cursor);
    cursor += size(c);
  }
  os << "(node " << id << " :goal \"" << print(node.goal) << "\" :rule "
     << node.rule;
  if (!node.at.empty()) {
    os << " :at ";
    for (std::size_t i = 0; i < node.at.size(); ++i) {
      if (i) os << ",";
      os << node.at[i];
    }
  }
  if (!node.inst.bindings().empty()) {
    os << " :inst {";
    bool first = true;
    for (const auto& [mv, payload] : node.inst.bindings()) {
      if (!first) os << ", ";
      first = false;
      os << mv << " = " << payload_text(payload);
    }
    os << "}";
  }
  os << " :kids [";
  for (std::size_t i = 0; i < kid_ids.size(); ++i) {
    if (i) os << ", ";
    os << kid_ids[i];
  }
  os << "])\n";
  for (const auto& c : node.children) write_node(os, c, next_id);
}

struct RecordScanner {
  const std::string& src;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < src.size()) {
      if (src[pos] == '/' && pos + 1 < src.size() && src[pos + 1] == '/') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(src[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool done() {
    skip_space();
    return pos >= src.size();
  }

  char peek() {
    skip_space();
    if (pos >= src.size()) throw Error("unexpected end of proof file");
    return src[pos];
  }

  void expect(char c) {
    if (peek() != c)
      throw Error(std::string("expected '") + c + "' in proof file at offset " +
                  std::to_string(pos));
    ++pos;
  }

  bool accept(char c) {
    if (done() || src[pos] != c) return false;
    ++pos;
    return true;
  }

  std::string symbol() {
    skip_space();
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) ||
            src[pos] == '_' || src[pos] == '-')) {
      ++pos;
    }
    if (start == pos) throw Error("expected a symbol in proof file");
    return src.substr(start, pos - start);
  }

  int integer() {
    skip_space();
    std::size_t start = pos;
    if (pos < src.size() && src[pos] == '-') ++pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos])))
      ++pos;
    if (start == pos) throw Error("expected an integer in proof file");
    return std::stoi(src.substr(start, pos - start));
  }

  std::string quoted() {
    expect('"');
    std::size_t start = pos;
    while (pos < src.size() && src[pos] != '"') ++pos;
    if (pos >= src.size()) throw Error("unterminated string in proof file");
    std::string out = src.substr(start, pos - start);
    ++pos;
    return out;
  }

  // Text up to a comma or closer at bracket depth zero.
  std::string balanced_until_break() {
    skip_space();
    std::size_t start = pos;
    int depth = 0;
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '(' || c == '[' || c == '{') ++depth;
      if (c == ')' || c == ']' || c == '}') {
        if (depth == 0) break;
        --depth;
      }
      if (c == ',' && depth == 0) break;
      ++pos;
    }
    std::string out = src.substr(start, pos - start);
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
      out.pop_back();
    return out;
  }
};

struct RawNode {
  int id = 0;
  Sequent goal;
  std::string rule;
  Instantiation inst;
  std::vector<int> at;
  std::vector<int> kids;
};

RawNode read_record(RecordScanner& sc) {
  sc.expect('(');
  if (sc.symbol() != "node") throw Error("expected 'node' record");
  RawNode node;
  node.id = sc.integer();
  while (sc.peek() != ')') {
    sc.expect(':');
    std::string key = sc.symbol();
    if (key == "goal") {
      node.goal = parse_sequent(sc.quoted());
    } else if (key == "rule") {
      node.rule = sc.symbol();
    } else if (key == "at") {
      node.at.push_back(sc.integer());
      while (sc.accept(',')) node.at.push_back(sc.integer());
    } else if (key == "inst") {
      sc.expect('{');
      const auto& table = rule_metavars();
      auto rule_it = table.find(node.rule);
      while (sc.peek() != '}') {
        std::string mv = sc.symbol();
        sc.expect('=');
        std::string text = sc.balanced_until_break();
        if (rule_it == table.end())
          throw Error("rule " + node.rule + " takes no instantiation");
        auto kind_it = rule_it->second.find(mv);
        if (kind_it == rule_it->second.end())
          throw Error("rule " + node.rule + " has no metavariable " + mv);
        node.inst.bind(mv, parse_payload(kind_it->second, text));
        sc.accept(',');
      }
      sc.expect('}');
    } else if (key == "kids") {
      sc.expect('[');
      if (sc.peek() != ']') {
        node.kids.push_back(sc.integer());
        while (sc.accept(',')) node.kids.push_back(sc.integer());
      }
      sc.expect(']');
    } else {
      throw Error("unknown proof record key :" + key);
    }
  }
  sc.expect(')');
  return node;
}

ProofNode link(int id, const std::map<int, RawNode>& nodes,
               std::set<int>& visiting) {
  auto it = nodes.find(id);
  if (it == nodes.end())
    throw Error("proof node " + std::to_string(id) + " is missing");
  if (!visiting.insert(id).second)
    throw Error("proof node " + std::to_string(id) + " forms a cycle");
  const RawNode& raw = it->second;
  ProofNode out;
  out.goal = raw.goal;
  out.rule = raw.rule;
  out.inst = raw.inst;
  out.at = raw.at;
  for (int kid : raw.kids) out.children.push_back(link(kid, nodes, visiting));
  visiting.erase(id);
  return out;
}

}  // namespace

std::string write_proof(const ProofScript& script) {
  std::ostringstream os;
  int next_id = 0;
  write_node(os, script, next_id);
  return os.str();
}

ProofScript read_proof(const std::string& text) {
  RecordScanner sc{text};
  std::map<int, RawNode> nodes;
  while (!sc.done()) {
    RawNode n = read_record(sc);
    if (!nodes.emplace(n.id, n).second)
      throw Error("duplicate proof node id " + std::to_string(n.id));
  }
  if (nodes.empty()) throw Error("empty proof file");
  std::set<int> visiting;
  return link(0, nodes, visiting);
}

std::string check_report_json(const CheckReport& report) {
  nlohmann::ordered_json j;
  j["schema"] = "dal-check/1";
  j["status"] = to_string(report.status);
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const auto& n : report.nodes) {
    nlohmann::ordered_json e;
    e["id"] = n.id;
    e["rule"] = n.rule;
    e["verdict"] = n.verdict;
    if (!n.tier.empty()) e["tier"] = n.tier;
    if (!n.detail.empty()) e["detail"] = n.detail;
    nodes.push_back(e);
  }
  j["nodes"] = nodes;
  return j.dump(2) + "\n";
}

}  // namespace dal
