#include "alloysmt/smt.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "alloysmt/diagnostics.hpp"

namespace alloysmt::smt {

namespace {

Term make(Node n) { return std::make_shared<const Node>(std::move(n)); }

const std::set<std::string, std::less<>>& reserved() {
  static const std::set<std::string, std::less<>> words = {
      "_",         "!",          "as",         "let",           "exists",     "forall",
      "match",     "par",        "BINARY",     "DECIMAL",       "HEXADECIMAL", "NUMERAL",
      "STRING",    "assert",     "check-sat",  "declare-const", "declare-fun", "declare-sort",
      "define-fun", "define-sort", "exit",     "get-model",     "push",       "pop",
      "set-logic", "set-option", "set-info"};
  return words;
}

bool symbol_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  return std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

}  // namespace

Term sym(std::string name) {
  Node n;
  n.atom = std::move(name);
  return make(std::move(n));
}

Term list(std::vector<Term> kids) {
  Node n;
  n.is_list = true;
  n.kids = std::move(kids);
  return make(std::move(n));
}

Term app(std::string head, std::vector<Term> args) {
  if (args.empty()) return sym(std::move(head));
  args.insert(args.begin(), sym(std::move(head)));
  return list(std::move(args));
}

bool is_atom(const Term& t, std::string_view name) { return !t->is_list && t->atom == name; }

bool same(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a->is_list != b->is_list || a->atom != b->atom || a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!same(a->kids[i], b->kids[i])) return false;
  }
  return true;
}

Term mk_true() {
  static const Term t = sym("true");
  return t;
}

Term mk_false() {
  static const Term f = sym("false");
  return f;
}

Term mk_bool(bool value) { return value ? mk_true() : mk_false(); }

namespace {

bool is_app(const Term& t, std::string_view head) {
  return t->is_list && !t->kids.empty() && is_atom(t->kids[0], head);
}

Term nary(std::string_view op, std::vector<Term> kids) {
  const bool is_and = op == "and";
  const Term unit = is_and ? mk_true() : mk_false();
  const Term zero = is_and ? mk_false() : mk_true();
  std::vector<Term> flat;
  for (auto& k : kids) {
    if (same(k, unit)) continue;
    if (same(k, zero)) return zero;
    if (is_app(k, op)) {
      flat.insert(flat.end(), k->kids.begin() + 1, k->kids.end());
      continue;
    }
    if (std::none_of(flat.begin(), flat.end(), [&](const Term& f) { return same(f, k); }))
      flat.push_back(std::move(k));
  }
  if (flat.empty()) return unit;
  if (flat.size() == 1) return flat[0];
  return app(std::string(op), std::move(flat));
}

}  // namespace

Term mk_not(Term a) {
  if (same(a, mk_true())) return mk_false();
  if (same(a, mk_false())) return mk_true();
  if (is_app(a, "not")) return a->kids[1];
  return app("not", {std::move(a)});
}

Term mk_and(std::vector<Term> kids) { return nary("and", std::move(kids)); }
Term mk_or(std::vector<Term> kids) { return nary("or", std::move(kids)); }

Term mk_implies(Term a, Term b) {
  if (same(a, mk_true())) return b;
  if (same(a, mk_false()) || same(b, mk_true())) return mk_true();
  if (same(b, mk_false())) return mk_not(std::move(a));
  return app("=>", {std::move(a), std::move(b)});
}

Term mk_iff(Term a, Term b) {
  if (same(a, mk_true())) return b;
  if (same(b, mk_true())) return a;
  if (same(a, mk_false())) return mk_not(std::move(b));
  if (same(b, mk_false())) return mk_not(std::move(a));
  if (same(a, b)) return mk_true();
  return app("=", {std::move(a), std::move(b)});
}

Term mk_eq(Term a, Term b) {
  if (same(a, b)) return mk_true();
  return app("=", {std::move(a), std::move(b)});
}

Term mk_ite(Term c, Term a, Term b) {
  if (same(c, mk_true())) return a;
  if (same(c, mk_false())) return b;
  if (same(a, b)) return a;
  if (same(a, mk_true()) && same(b, mk_false())) return c;
  if (same(a, mk_false()) && same(b, mk_true())) return mk_not(std::move(c));
  return app("ite", {std::move(c), std::move(a), std::move(b)});
}

namespace {

Term binder(const char* q, std::vector<SortedVar> vars, Term body) {
  if (vars.empty() || same(body, mk_true()) || same(body, mk_false())) return body;
  std::vector<Term> decls;
  for (auto& [name, sort] : vars) decls.push_back(list({sym(std::move(name)), sym(std::move(sort))}));
  return list({sym(q), list(std::move(decls)), std::move(body)});
}

}  // namespace

Term mk_forall(std::vector<SortedVar> vars, Term body) {
  return binder("forall", std::move(vars), std::move(body));
}

Term mk_exists(std::vector<SortedVar> vars, Term body) {
  return binder("exists", std::move(vars), std::move(body));
}

bool is_simple_symbol(std::string_view name) {
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0]))) return false;
  if (!std::all_of(name.begin(), name.end(), symbol_char)) return false;
  return reserved().find(name) == reserved().end();
}

std::string quote_symbol(std::string_view name) {
  if (is_simple_symbol(name)) return std::string(name);
  // Keywords, numerals, string literals and reserved words are syntax, not symbols.
  const bool numeral = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
  if (numeral || reserved().count(name)) return std::string(name);
  if (!name.empty() && (name[0] == ':' || name[0] == '"')) return std::string(name);
  return "|" + std::string(name) + "|";
}

namespace {

void print_to(std::ostringstream& os, const Term& t) {
  if (!t->is_list) {
    os << quote_symbol(t->atom);
    return;
  }
  os << '(';
  for (std::size_t i = 0; i < t->kids.size(); ++i) {
    if (i) os << ' ';
    print_to(os, t->kids[i]);
  }
  os << ')';
}

void pretty_to(std::ostringstream& os, const Term& t, int indent, int width) {
  const std::string flat = print(t);
  if (!t->is_list || static_cast<int>(flat.size()) + indent <= width || t->kids.size() < 2) {
    os << flat;
    return;
  }
  // Head and, for binders, the variable list stay on the first line.
  std::size_t inline_kids = 1;
  if (is_app(t, "forall") || is_app(t, "exists") || is_app(t, "let")) inline_kids = 2;
  if (is_app(t, "define-fun")) inline_kids = 4;
  os << '(';
  for (std::size_t i = 0; i < t->kids.size(); ++i) {
    if (i < inline_kids) {
      if (i) os << ' ';
      os << print(t->kids[i]);
      continue;
    }
    os << '\n' << std::string(static_cast<std::size_t>(indent + 2), ' ');
    pretty_to(os, t->kids[i], indent + 2, width);
  }
  os << ')';
}

}  // namespace

std::string print(const Term& t) {
  std::ostringstream os;
  print_to(os, t);
  return os.str();
}

std::string pretty(const Term& t, int width) {
  std::ostringstream os;
  pretty_to(os, t, 0, width);
  return os.str();
}

// ---- parser ---------------------------------------------------------------------------

std::vector<Term> parse(std::string_view text) {
  std::vector<std::vector<Term>> stack(1);
  std::size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::Solver, "malformed solver output: " + what + " at offset " + std::to_string(i));
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '(') {
      stack.emplace_back();
      ++i;
    } else if (c == ')') {
      if (stack.size() < 2) fail("unbalanced ')'");
      auto kids = std::move(stack.back());
      stack.pop_back();
      stack.back().push_back(list(std::move(kids)));
      ++i;
    } else if (c == '|') {
      const auto end = text.find('|', i + 1);
      if (end == std::string_view::npos) fail("unterminated quoted symbol");
      stack.back().push_back(sym(std::string(text.substr(i + 1, end - i - 1))));
      i = end + 1;
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (true) {
        if (j >= text.size()) fail("unterminated string");
        if (text[j] == '"') {
          if (j + 1 < text.size() && text[j + 1] == '"') {
            j += 2;
            continue;
          }
          break;
        }
        ++j;
      }
      stack.back().push_back(sym(std::string(text.substr(i, j - i + 1))));
      i = j + 1;
    } else {
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != '(' &&
             text[j] != ')' && text[j] != ';' && text[j] != '|' && text[j] != '"')
        ++j;
      stack.back().push_back(sym(std::string(text.substr(i, j - i))));
      i = j;
    }
  }
  if (stack.size() != 1) fail("unbalanced '('");
  return std::move(stack[0]);
}

// ---- scripts --------------------------------------------------------------------------

void Script::comment(std::string text) { commands_.push_back(Command{nullptr, std::move(text)}); }

void Script::add(Term command, std::string comment) {
  commands_.push_back(Command{std::move(command), std::move(comment)});
}

void Script::set_logic(std::string logic) { add(app("set-logic", {sym(std::move(logic))})); }

void Script::set_option(std::string option, std::string value) {
  add(app("set-option", {sym(std::move(option)), sym(std::move(value))}));
}

void Script::declare_sort(const std::string& name) { add(app("declare-sort", {sym(name), sym("0")})); }

void Script::declare_fun(const std::string& name, const std::vector<std::string>& args,
                         const std::string& result) {
  std::vector<Term> sorts;
  for (const auto& a : args) sorts.push_back(sym(a));
  add(list({sym("declare-fun"), sym(name), list(std::move(sorts)), sym(result)}));
}

void Script::declare_const(const std::string& name, const std::string& sort) {
  add(app("declare-const", {sym(name), sym(sort)}));
}

void Script::define_fun(const std::string& name, const std::vector<SortedVar>& params,
                        const std::string& result, Term body) {
  std::vector<Term> decls;
  for (const auto& [p, s] : params) decls.push_back(list({sym(p), sym(s)}));
  add(list({sym("define-fun"), sym(name), list(std::move(decls)), sym(result), std::move(body)}));
}

void Script::assert_(Term t, std::string comment) { add(app("assert", {std::move(t)}), std::move(comment)); }

std::string Script::str() const {
  std::ostringstream os;
  for (const auto& c : commands_) {
    if (!c.comment.empty()) {
      std::istringstream lines(c.comment);
      std::string line;
      while (std::getline(lines, line)) os << ";; " << line << '\n';
    }
    if (c.term) os << pretty(c.term) << '\n';
  }
  return os.str();
}

// ---- interpretations ------------------------------------------------------------------

void Interpretation::add_sort(const std::string& sort, std::vector<std::string> elements) {
  for (std::size_t i = 0; i < elements.size(); ++i) elements_[elements[i]] = {sort, static_cast<int>(i)};
  sorts_[sort] = std::move(elements);
}

void Interpretation::add_sort(const std::string& sort, int size) {
  std::vector<std::string> names;
  for (int i = 0; i < size; ++i) names.push_back(sort + "!val!" + std::to_string(i));
  add_sort(sort, std::move(names));
}

const std::vector<std::string>& Interpretation::elements(const std::string& sort) const {
  const auto it = sorts_.find(sort);
  if (it == sorts_.end()) throw Error(ErrorKind::Solver, "no universe for sort " + sort);
  return it->second;
}

int Interpretation::sort_size(const std::string& sort) const {
  if (sort == "Bool") return 2;
  return static_cast<int>(elements(sort).size());
}

Interpretation Interpretation::from_model(const std::vector<Term>& model) {
  Interpretation out;
  std::vector<Term> items;
  for (const auto& t : model) {
    if (t->is_list && !t->kids.empty() && is_atom(t->kids[0], "model")) {
      items.insert(items.end(), t->kids.begin() + 1, t->kids.end());
    } else if (t->is_list && !t->kids.empty() && t->kids[0]->is_list) {
      items.insert(items.end(), t->kids.begin(), t->kids.end());
    } else if (t->is_list && t->kids.empty()) {
      continue;
    } else {
      items.push_back(t);
    }
  }
  std::map<std::string, std::vector<std::string>> universes;
  for (const auto& it : items) {
    if (!is_app(it, "declare-fun") || it->kids.size() != 4) continue;
    const auto& name = it->kids[1]->atom;
    const auto& sort = it->kids[3]->atom;
    if (it->kids[2]->is_list && it->kids[2]->kids.empty() && name.find("!val!") != std::string::npos)
      universes[sort].push_back(name);
  }
  for (auto& [sort, elems] : universes) out.add_sort(sort, std::move(elems));
  for (const auto& it : items) {
    if (!is_app(it, "define-fun") || it->kids.size() != 5) continue;
    std::vector<SortedVar> params;
    for (const auto& d : it->kids[2]->kids) params.emplace_back(d->kids.at(0)->atom, print(d->kids.at(1)));
    out.define(it->kids[1]->atom, std::move(params), print(it->kids[3]), it->kids[4]);
  }
  return out;
}

void Interpretation::define(const std::string& name, std::vector<SortedVar> params, std::string result,
                            Term body) {
  Fun f;
  for (const auto& p : params) f.arg_sorts.push_back(p.second);
  f.params = std::move(params);
  f.result = std::move(result);
  f.body = std::move(body);
  funs_[name] = std::move(f);
}

void Interpretation::set_table(const std::string& name, std::vector<std::string> arg_sorts,
                               std::string result, std::function<int(const std::vector<int>&)> table) {
  Fun f;
  f.arg_sorts = std::move(arg_sorts);
  f.result = std::move(result);
  f.table = std::move(table);
  funs_[name] = std::move(f);
}

void Interpretation::set_constant(const std::string& name, std::string sort, int value) {
  set_table(name, {}, std::move(sort), [value](const std::vector<int>&) { return value; });
}

void Interpretation::load_definitions(const Script& script) {
  for (const auto& c : script.commands()) {
    const auto& t = c.term;
    if (!t || !is_app(t, "define-fun")) continue;
    std::vector<SortedVar> params;
    for (const auto& d : t->kids[2]->kids) params.emplace_back(d->kids[0]->atom, print(d->kids[1]));
    define(t->kids[1]->atom, std::move(params), print(t->kids[3]), t->kids[4]);
  }
}

bool Interpretation::defines(const std::string& name) const { return funs_.count(name) > 0; }

std::string Interpretation::result_sort(const std::string& name) const {
  const auto it = funs_.find(name);
  if (it == funs_.end()) throw Error(ErrorKind::Solver, "no interpretation for " + name);
  return it->second.result;
}

int Interpretation::eval(const Term& t) const {
  Env env;
  return eval(t, env);
}

int Interpretation::quantified(const Term& t, Env& env, bool universal) const {
  const auto& decls = t->kids.at(1)->kids;
  const std::size_t base = env.size();
  std::vector<int> sizes;
  for (const auto& d : decls) {
    sizes.push_back(sort_size(print(d->kids.at(1))));
    env.emplace_back(d->kids.at(0)->atom, 0);
  }
  int result = universal ? 1 : 0;
  if (std::find(sizes.begin(), sizes.end(), 0) == sizes.end()) {
    while (true) {
      const int v = eval(t->kids.at(2), env);
      if (universal && !v) {
        result = 0;
        break;
      }
      if (!universal && v) {
        result = 1;
        break;
      }
      std::size_t k = 0;
      while (k < sizes.size()) {
        if (++env[base + k].second < sizes[k]) break;
        env[base + k].second = 0;
        ++k;
      }
      if (k == sizes.size()) break;
    }
  }
  env.resize(base);
  return result;
}

int Interpretation::eval(const Term& t, Env& env) const {
  if (!t->is_list) {
    const auto& a = t->atom;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == a) return it->second;
    }
    if (a == "true") return 1;
    if (a == "false") return 0;
    if (const auto e = elements_.find(a); e != elements_.end()) return e->second.second;
    const auto f = funs_.find(a);
    if (f == funs_.end()) throw Error(ErrorKind::Solver, "no interpretation for symbol " + a);
    if (f->second.table) return f->second.table({});
    Env inner;
    return eval(f->second.body, inner);
  }
  if (t->kids.empty()) throw Error(ErrorKind::Solver, "cannot evaluate ()");
  const Term& head = t->kids[0];
  const auto arg = [&](std::size_t i) { return eval(t->kids.at(i), env); };
  const std::size_t n = t->kids.size() - 1;
  if (head->is_list) throw Error(ErrorKind::Solver, "unsupported term " + print(t));
  const std::string& op = head->atom;
  if (op == "not") return 1 - arg(1);
  if (op == "and") {
    for (std::size_t i = 1; i <= n; ++i) {
      if (!arg(i)) return 0;
    }
    return 1;
  }
  if (op == "or") {
    for (std::size_t i = 1; i <= n; ++i) {
      if (arg(i)) return 1;
    }
    return 0;
  }
  if (op == "=>") {
    for (std::size_t i = 1; i < n; ++i) {
      if (!arg(i)) return 1;
    }
    return arg(n);
  }
  if (op == "=") {
    const int first = arg(1);
    for (std::size_t i = 2; i <= n; ++i) {
      if (arg(i) != first) return 0;
    }
    return 1;
  }
  if (op == "distinct") {
    std::vector<int> seen;
    for (std::size_t i = 1; i <= n; ++i) {
      const int v = arg(i);
      if (std::find(seen.begin(), seen.end(), v) != seen.end()) return 0;
      seen.push_back(v);
    }
    return 1;
  }
  if (op == "ite") return arg(1) ? arg(2) : arg(3);
  if (op == "forall") return quantified(t, env, true);
  if (op == "exists") return quantified(t, env, false);
  if (op == "!") return arg(1);
  if (op == "let") {
    const std::size_t base = env.size();
    std::vector<std::pair<std::string, int>> binds;
    for (const auto& b : t->kids.at(1)->kids) binds.emplace_back(b->kids.at(0)->atom, eval(b->kids.at(1), env));
    env.insert(env.end(), binds.begin(), binds.end());
    const int v = eval(t->kids.at(2), env);
    env.resize(base);
    return v;
  }
  const auto f = funs_.find(op);
  if (f == funs_.end()) throw Error(ErrorKind::Solver, "no interpretation for function " + op);
  std::vector<int> args;
  for (std::size_t i = 1; i <= n; ++i) args.push_back(arg(i));
  if (f->second.table) return f->second.table(args);
  if (args.size() != f->second.params.size())
    throw Error(ErrorKind::Solver, "arity mismatch applying " + op);
  Env inner;
  for (std::size_t i = 0; i < args.size(); ++i) inner.emplace_back(f->second.params[i].first, args[i]);
  return eval(f->second.body, inner);
}

}  // namespace alloysmt::smt
