#include "prange/error.hpp"
#include "prange/expr.hpp"

#include <cctype>
#include <charconv>

namespace prange {

namespace {

class Parser {
public:
    Parser(std::string_view text, const std::function<std::size_t(std::string_view)>& resolve)
        : text_(text), resolve_(resolve) {}

    Expr parse() {
        Expr e = expression();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::ParseError,
                    "expression '" + std::string(text_) + "' at column " + std::to_string(pos_ + 1) +
                        ": " + what);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expression() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) lhs = lhs + term();
            else if (accept('-')) lhs = lhs - term();
            else return lhs;
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = lhs * unary();
            else if (accept('/')) lhs = lhs / unary();
            else return lhs;
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (start == pos_) fail("exponent must be a non-negative integer literal");
        int k = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
        if (ec != std::errc()) fail("exponent out of range");
        return Expr::power(base, k);
    }

    Expr primary() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr inner = expression();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view ident = text_.substr(start, pos_ - start);
            if (accept('(')) {
                if (ident != "sqrt") fail("unknown function '" + std::string(ident) + "'");
                Expr arg = expression();
                if (!accept(')')) fail("expected ')'");
                return Expr::sqrt(arg);
            }
            return Expr::variable(resolve_(ident));
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
            if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
                pos_ = p;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_) fail("malformed number");
        return Expr::constant(v);
    }

    std::string_view text_;
    const std::function<std::size_t(std::string_view)>& resolve_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse_expression(std::string_view text,
                      const std::function<std::size_t(std::string_view)>& resolve) {
    return Parser(text, resolve).parse();
}

} // namespace prange
