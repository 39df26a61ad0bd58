#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "seqfam/exact.hpp"

namespace seqfam {

/**
 * A root rule x(n, l) written as an arithmetic expression over the
 * variables `n` and `l`, e.g. "l", "1/2", "3^l", "l^2 - n".
 *
 * Grammar (usual precedence, '^' right-associative, exponent must be an
 * integer):
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := unary (('*' | '/') unary)*
 *   unary   := '-' unary | power
 *   power   := primary ('^' unary)?
 *   primary := integer | 'n' | 'l' | '(' expr ')'
 */
class RootExpression {
 public:
  static RootExpression parse(std::string_view text) {
    Parser p{text, 0};
    auto node = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    RootExpression e;
    e.text_ = std::string(text);
    e.root_ = std::move(node);
    return e;
  }

  /// Reads a rule file: '#' starts a comment, remaining lines are joined.
  static RootExpression load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open roots file: " + path.string());
    std::string line, joined;
    while (std::getline(in, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      joined += line;
      joined += ' ';
    }
    return parse(joined);
  }

  ExactScalar operator()(std::int64_t n, std::int64_t l) const { return root_->eval(n, l); }

  const std::string& text() const { return text_; }

 private:
  struct Node {
    enum class Op { constant, var_n, var_l, neg, add, sub, mul, div, pow } op;
    ExactScalar value;
    std::shared_ptr<const Node> lhs, rhs;

    ExactScalar eval(std::int64_t n, std::int64_t l) const {
      switch (op) {
        case Op::constant: return value;
        case Op::var_n: return n;
        case Op::var_l: return l;
        case Op::neg: return -lhs->eval(n, l);
        case Op::add: return lhs->eval(n, l) + rhs->eval(n, l);
        case Op::sub: return lhs->eval(n, l) - rhs->eval(n, l);
        case Op::mul: return lhs->eval(n, l) * rhs->eval(n, l);
        case Op::div: return lhs->eval(n, l) / rhs->eval(n, l);
        case Op::pow: {
          ExactScalar e = rhs->eval(n, l);
          if (!e.is_integer() || !e.numerator().fits_slong_p())
            throw std::domain_error("root expression: exponent " + e.str() + " is not a machine integer");
          return seqfam::pow(lhs->eval(n, l), e.numerator().get_si());
        }
      }
      throw std::logic_error("root expression: bad node");
    }
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr, ExactScalar v = {}) {
    return std::make_shared<const Node>(Node{op, std::move(v), std::move(a), std::move(b)});
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& what) const {
      throw std::invalid_argument("root expression: " + what + " at column " + std::to_string(pos + 1) +
                                  " in '" + std::string(s) + "'");
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr expr() {
      NodePtr left = term();
      for (;;) {
        if (accept('+')) left = make(Node::Op::add, left, term());
        else if (accept('-')) left = make(Node::Op::sub, left, term());
        else return left;
      }
    }
    NodePtr term() {
      NodePtr left = unary();
      for (;;) {
        if (accept('*')) left = make(Node::Op::mul, left, unary());
        else if (accept('/')) left = make(Node::Op::div, left, unary());
        else return left;
      }
    }
    NodePtr unary() {
      if (accept('-')) return make(Node::Op::neg, unary());
      return power();
    }
    NodePtr power() {
      NodePtr base = primary();
      if (accept('^')) return make(Node::Op::pow, base, unary());
      return base;
    }
    NodePtr primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      char c = s[pos];
      if (c == '(') {
        ++pos;
        NodePtr inner = expr();
        if (!accept(')')) fail("expected ')'");
        return inner;
      }
      if (c == 'n') {
        ++pos;
        return make(Node::Op::var_n);
      }
      if (c == 'l') {
        ++pos;
        return make(Node::Op::var_l);
      }
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        return make(Node::Op::constant, nullptr, nullptr, ExactScalar::parse(s.substr(start, pos - start)));
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  std::string text_;
  NodePtr root_;
};

}  // namespace seqfam
