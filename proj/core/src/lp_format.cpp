#include "bip/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace bip {
namespace {

bool lp_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(' ||
         c == ')';
}

bool is_keyword(const std::string& lower) {
  static const std::unordered_set<std::string> kw = {
      "maximize", "minimize", "max",      "min", "subject", "to", "st",
      "bounds",   "bound",    "binary",   "bin", "binaries", "end",
      "general",  "generals", "integer",  "obj", "free"};
  return kw.contains(lower);
}

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_expr(std::string& out, const LinearModel& model,
                 const LinearExpr& expr,
                 const std::unordered_map<int, std::string>& exported) {
  bool first = true;
  for (const auto& t : expr.terms()) {
    double c = t.coeff;
    if (first) {
      if (c < 0) { out += "- "; c = -c; }
    } else {
      out += c < 0 ? " - " : " + ";
      c = std::abs(c);
    }
    if (c != 1.0) {
      out += format_number(c);
      out += ' ';
    }
    out += exported.at(t.var.value);
    first = false;
    (void)model;
  }
  double k = expr.constant();
  if (k != 0.0 || first) {
    if (!first) out += k < 0 ? " - " : " + ";
    else if (k < 0) out += "- ";
    out += format_number(std::abs(k));
  }
}

struct Token {
  enum Kind { kNumber, kName, kPlus, kMinus, kRelation } kind;
  double number = 0.0;
  std::string text;   // name, or relation spelling
};

std::vector<Token> tokenize(const std::string& line, int line_no) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '\\') break;  // comment to end of line
    if (c == '+') { { Token t; t.kind = Token::kPlus; out.push_back(t); } ++i; continue; }
    if (c == '-') { { Token t; t.kind = Token::kMinus; out.push_back(t); } ++i; continue; }
    if (c == '<' || c == '>' || c == '=') {
      std::string rel(1, c);
      ++i;
      if (i < line.size() && line[i] == '=') { rel += '='; ++i; }
      Token t;
      t.kind = Token::kRelation;
      t.text = rel;
      out.push_back(t);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* start = line.c_str() + i;
      char* end = nullptr;
      double v = std::strtod(start, &end);
      if (end == start) throw ParseError("malformed number", line_no);
      Token t;
      t.kind = Token::kNumber;
      t.number = v;
      out.push_back(t);
      i += end - start;
      continue;
    }
    if (lp_name_char(c)) {
      size_t j = i;
      while (j < line.size() && lp_name_char(line[j])) ++j;
      std::string name = line.substr(i, j - i);
      i = j;
      if (i < line.size() && line[i] == ':') {
        ++i;
        Token t;
        t.kind = Token::kName;
        t.text = name + ":";
        out.push_back(t);
      } else {
        Token t;
        t.kind = Token::kName;
        t.text = name;
        out.push_back(t);
      }
      continue;
    }
    if (c == ':') { ++i; continue; }
    throw ParseError(std::string("unexpected character '") + c + "'", line_no);
  }
  return out;
}

class Parser {
 public:
  LinearModel parse(const std::string& content) {
    std::vector<std::string> lines;
    {
      std::istringstream in(content);
      std::string line;
      while (std::getline(in, line)) lines.push_back(line);
    }

    enum Section { kStart, kObjective, kRows, kBounds, kBinary, kDone };
    Section section = kStart;
    Sense sense = Sense::kMaximize;

    std::vector<Token> pending;       // expression tokens carried over lines
    std::string pending_label;
    int pending_line = 0;
    bool have_objective = false;
    LinearExpr objective;

    struct Row {
      std::string label;
      LinearExpr expr;
      Relation rel;
      double rhs;
    };
    std::vector<Row> rows;
    std::vector<std::string> binary_names;
    std::vector<std::pair<std::string, std::pair<double, double>>> bounds;

    auto flush_row = [&](int line_no) {
      if (pending.empty()) return;
      Row row;
      row.label = pending_label.empty()
                      ? "r" + std::to_string(rows.size())
                      : pending_label;
      size_t rel_pos = pending.size();
      for (size_t k = 0; k < pending.size(); ++k) {
        if (pending[k].kind == Token::kRelation) { rel_pos = k; break; }
      }
      if (rel_pos == pending.size())
        throw ParseError("constraint without relation", line_no);
      row.expr = parse_expr(pending, 0, rel_pos, line_no);
      const std::string& rel = pending[rel_pos].text;
      row.rel = rel == "<=" || rel == "<"   ? Relation::kLessEqual
                : rel == ">=" || rel == ">" ? Relation::kGreaterEqual
                                            : Relation::kEqual;
      LinearExpr rhs_expr =
          parse_expr(pending, rel_pos + 1, pending.size(), line_no);
      if (!rhs_expr.terms().empty())
        throw ParseError("right-hand side must be constant", line_no);
      row.rhs = rhs_expr.constant();
      rows.push_back(std::move(row));
      pending.clear();
      pending_label.clear();
    };

    for (size_t li = 0; li < lines.size(); ++li) {
      int line_no = static_cast<int>(li) + 1;
      std::string stripped = lines[li];
      if (auto pos = stripped.find('\\'); pos != std::string::npos)
        stripped.resize(pos);
      std::string lower = to_lower(stripped);
      auto trim = [](std::string s) {
        auto issp = [](unsigned char c) { return std::isspace(c); };
        while (!s.empty() && issp(s.front())) s.erase(s.begin());
        while (!s.empty() && issp(s.back())) s.pop_back();
        return s;
      };
      std::string key = trim(lower);

      if (key == "maximize" || key == "max") {
        sense = Sense::kMaximize;
        section = kObjective;
        continue;
      }
      if (key == "minimize" || key == "min") {
        sense = Sense::kMinimize;
        section = kObjective;
        continue;
      }
      if (key == "subject to" || key == "st" || key == "s.t." ||
          key == "such that") {
        if (section == kObjective) {
          objective = parse_expr(pending, 0, pending.size(), line_no);
          have_objective = true;
          pending.clear();
          pending_label.clear();
        }
        section = kRows;
        continue;
      }
      if (key == "bounds" || key == "bound") {
        flush_row(line_no);
        section = kBounds;
        continue;
      }
      if (key == "binary" || key == "binaries" || key == "bin") {
        flush_row(line_no);
        section = kBinary;
        continue;
      }
      if (key == "general" || key == "generals" || key == "integer") {
        throw ParseError("general integer variables are not supported",
                         line_no);
      }
      if (key == "end") {
        flush_row(line_no);
        section = kDone;
        continue;
      }
      if (key.empty()) continue;

      std::vector<Token> toks = tokenize(stripped, line_no);
      if (toks.empty()) continue;
      switch (section) {
        case kStart:
          throw ParseError("expected Maximize or Minimize", line_no);
        case kObjective: {
          size_t start = 0;
          if (toks[0].kind == Token::kName && toks[0].text.back() == ':')
            start = 1;
          for (size_t k = start; k < toks.size(); ++k)
            pending.push_back(toks[k]);
          break;
        }
        case kRows: {
          size_t start = 0;
          if (toks[0].kind == Token::kName && toks[0].text.back() == ':') {
            flush_row(line_no);
            pending_label = toks[0].text.substr(0, toks[0].text.size() - 1);
            pending_line = line_no;
            start = 1;
          }
          for (size_t k = start; k < toks.size(); ++k)
            pending.push_back(toks[k]);
          bool has_rel = false;
          for (const auto& t : pending)
            if (t.kind == Token::kRelation) has_rel = true;
          if (has_rel) flush_row(pending_line ? pending_line : line_no);
          break;
        }
        case kBounds: {
          // Accept exactly "0 <= name <= 1".
          if (toks.size() == 5 && toks[0].kind == Token::kNumber &&
              toks[1].kind == Token::kRelation &&
              toks[2].kind == Token::kName &&
              toks[3].kind == Token::kRelation &&
              toks[4].kind == Token::kNumber) {
            bounds.push_back(
                {toks[2].text, {toks[0].number, toks[4].number}});
          } else {
            throw ParseError("unsupported bounds line", line_no);
          }
          break;
        }
        case kBinary: {
          for (const auto& t : toks) {
            if (t.kind != Token::kName)
              throw ParseError("expected variable names", line_no);
            binary_names.push_back(t.text);
          }
          break;
        }
        case kDone:
          throw ParseError("content after End", line_no);
      }
    }
    flush_row(static_cast<int>(lines.size()));
    if (section == kObjective && !pending.empty()) {
      objective = parse_expr(pending, 0, pending.size(),
                             static_cast<int>(lines.size()));
      have_objective = true;
      pending.clear();
    }

    LinearModel model(sense);
    for (const std::string& name : order_) model.add_binary(name);
    for (const std::string& name : binary_names) {
      if (!index_.contains(name)) model.add_binary(name);
    }
    if (have_objective) model.set_objective(remap(objective, model));
    for (auto& row : rows)
      model.add_constraint(remap(row.expr, model), row.rel, row.rhs,
                           row.label);

    std::unordered_set<std::string> binary_set(binary_names.begin(),
                                               binary_names.end());
    bool any_continuous = false;
    for (const auto& [name, range] : bounds) {
      if (range.first != 0.0 || range.second != 1.0)
        throw ParseError("only [0,1] bounds are supported", 0);
      if (!model.find_var(name).has_value())
        throw ParseError("bounds for unknown variable " + name, 0);
      if (!binary_set.contains(name)) any_continuous = true;
    }
    if (any_continuous) {
      for (int j = 0; j < model.num_vars(); ++j) {
        if (binary_set.contains(model.var_name(VarId{j})))
          throw ParseError("mixed binary/continuous files are not supported",
                           0);
      }
      return model.relax();
    }
    return model;
  }

 private:
  LinearExpr parse_expr(const std::vector<Token>& toks, size_t begin,
                        size_t end, int line_no) {
    LinearExpr expr;
    double sign = 1.0;
    std::optional<double> coeff;
    for (size_t k = begin; k < end; ++k) {
      const Token& t = toks[k];
      switch (t.kind) {
        case Token::kPlus:
          if (coeff.has_value()) {
            expr.add_constant(sign * *coeff);
            coeff.reset();
          }
          sign = 1.0;
          break;
        case Token::kMinus:
          if (coeff.has_value()) {
            expr.add_constant(sign * *coeff);
            coeff.reset();
          }
          sign = -1.0;
          break;
        case Token::kNumber:
          if (coeff.has_value())
            throw ParseError("two numbers in a row", line_no);
          coeff = t.number;
          break;
        case Token::kName: {
          std::string name = t.text;
          if (name.back() == ':')
            throw ParseError("unexpected label", line_no);
          double c = sign * coeff.value_or(1.0);
          expr.add(intern(name), c);
          coeff.reset();
          sign = 1.0;
          break;
        }
        case Token::kRelation:
          throw ParseError("unexpected relation", line_no);
      }
    }
    if (coeff.has_value()) expr.add_constant(sign * *coeff);
    return expr;
  }

  VarId intern(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return VarId{it->second};
    int id = static_cast<int>(order_.size());
    index_.emplace(name, id);
    order_.push_back(name);
    return VarId{id};
  }

  // Expressions were built against intern() ids, which match the model's
  // add order, so the mapping is the identity; this re-adds terms so the
  // model can validate them.
  LinearExpr remap(const LinearExpr& e, const LinearModel& model) {
    (void)model;
    return e;
  }

  std::unordered_map<std::string, int> index_;
  std::vector<std::string> order_;
};

}  // namespace

std::string sanitize_lp_name(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) out += lp_name_char(c) ? c : '_';
  if (out.empty()) out = "v_";
  if (std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.')
    out = "v_" + out;
  if (is_keyword(to_lower(out))) out = "v_" + out;
  return out;
}

namespace {

std::unordered_map<int, std::string> export_names(const LinearModel& model) {
  std::unordered_map<int, std::string> out;
  std::unordered_set<std::string> used;
  for (int j = 0; j < model.num_vars(); ++j) {
    std::string s = sanitize_lp_name(model.var_name(VarId{j}));
    if (!used.insert(s).second)
      throw ModelError("unencodable name: '" + model.var_name(VarId{j}) +
                       "' collides after LP sanitization");
    out.emplace(j, std::move(s));
  }
  return out;
}

}  // namespace

std::string write_lp_string(const LinearModel& model) {
  auto exported = export_names(model);
  std::unordered_set<std::string> row_labels;
  std::string out;
  out += model.sense() == Sense::kMaximize ? "Maximize\n" : "Minimize\n";
  out += " obj: ";
  append_expr(out, model, model.objective(), exported);
  out += "\nSubject To\n";
  for (const Constraint& c : model.constraints()) {
    std::string label = sanitize_lp_name(c.label);
    if (!row_labels.insert(label).second)
      throw ModelError("unencodable name: constraint label '" + c.label +
                       "' collides after LP sanitization");
    out += ' ';
    out += label;
    out += ": ";
    append_expr(out, model, c.expr, exported);
    out += c.relation == Relation::kLessEqual      ? " <= "
           : c.relation == Relation::kGreaterEqual ? " >= "
                                                   : " = ";
    out += format_number(c.rhs);
    out += '\n';
  }
  bool any_continuous = false, any_binary = false;
  for (int j = 0; j < model.num_vars(); ++j) {
    (model.var_domain(VarId{j}) == VarDomain::kBinary ? any_binary
                                                      : any_continuous) = true;
  }
  if (any_continuous) {
    out += "Bounds\n";
    for (int j = 0; j < model.num_vars(); ++j) {
      if (model.var_domain(VarId{j}) == VarDomain::kContinuous)
        out += " 0 <= " + exported.at(j) + " <= 1\n";
    }
  }
  out += "Binary\n";
  if (any_binary) {
    for (int j = 0; j < model.num_vars(); ++j) {
      if (model.var_domain(VarId{j}) == VarDomain::kBinary)
        out += ' ' + exported.at(j) + '\n';
    }
  }
  out += "End\n";
  return out;
}

void write_lp(const LinearModel& model, const std::string& path) {
  std::string content = write_lp_string(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw IoError("failed writing " + path);
}

LinearModel parse_lp_string(const std::string& content) {
  Parser parser;
  return parser.parse(content);
}

LinearModel parse_lp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lp_string(buf.str());
}

Assignment read_solution_string(const std::string& content,
                                const LinearModel& model) {
  std::unordered_map<std::string, int> lookup;
  for (int j = 0; j < model.num_vars(); ++j) {
    lookup.emplace(model.var_name(VarId{j}), j);
    lookup.emplace(sanitize_lp_name(model.var_name(VarId{j})), j);
  }
  Assignment a(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) a.set(VarId{j}, 0.0);

  std::istringstream in(content);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    if (auto pos = line.find('\\'); pos != std::string::npos) line.resize(pos);
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;  // blank
    double value;
    if (!(ls >> value))
      throw ParseError("malformed solution line", line_no);
    std::string extra;
    if (ls >> extra) throw ParseError("malformed solution line", line_no);
    auto it = lookup.find(name);
    if (it == lookup.end())
      throw ParseError("unknown variable name " + name, line_no);
    a.set(VarId{it->second}, value);
  }
  return a;
}

Assignment read_solution(const std::string& path, const LinearModel& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_solution_string(buf.str(), model);
}

}  // namespace bip
