#include <cctype>
#include <charconv>
#include <vector>

#include "evolv/symbol.hpp"

namespace evolv {
namespace {

enum class Tok { number, imag, var, plus, minus, star, caret, lparen, rparen, end };

struct Token {
    Tok kind;
    std::size_t pos;
    double number = 0.0;
    int index = 0;
    bool integral = false;
};

constexpr int kMaxPower = 64;

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char ch = s[i];
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        switch (ch) {
            case '+': out.push_back({Tok::plus, i++}); continue;
            case '-': out.push_back({Tok::minus, i++}); continue;
            case '*': out.push_back({Tok::star, i++}); continue;
            case '^': out.push_back({Tok::caret, i++}); continue;
            case '(': out.push_back({Tok::lparen, i++}); continue;
            case ')': out.push_back({Tok::rparen, i++}); continue;
            default: break;
        }
        if (ch == 'i') {
            ++i;
            if (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i])))
                throw ParseError("unknown identifier", start);
            out.push_back({Tok::imag, start});
            continue;
        }
        if (ch == 'd') {
            ++i;
            if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
                throw ParseError("expected variable index after 'd'", i);
            int idx = 0;
            auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), idx);
            if (ec != std::errc{}) throw ParseError("bad variable index", i);
            i = static_cast<std::size_t>(ptr - s.data());
            if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i])))
                throw ParseError("unknown identifier", start);
            Token t{Tok::var, start};
            t.index = idx;
            out.push_back(t);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
            std::size_t j = i;
            bool integral = true;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && s[j] == '.') {
                integral = false;
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    integral = false;
                    j = k;
                    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                }
            }
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, v);
            if (ec != std::errc{} || ptr != s.data() + j) throw ParseError("malformed number", start);
            Token t{Tok::number, start};
            t.number = v;
            t.integral = integral;
            out.push_back(t);
            i = j;
            if (i < s.size() && std::isalpha(static_cast<unsigned char>(s[i])))
                throw ParseError("missing '*' between factors", i);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", i);
    }
    out.push_back({Tok::end, s.size()});
    return out;
}

class Parser {
public:
    Parser(std::vector<Token> toks, int n) : toks_(std::move(toks)), n_(n) {}

    OperatorSymbol parse() {
        OperatorSymbol r = expr();
        if (peek().kind != Tok::end) throw ParseError("unexpected trailing input", peek().pos);
        return r;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    OperatorSymbol expr() {
        OperatorSymbol r = term();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const bool minus = next().kind == Tok::minus;
            OperatorSymbol t = term();
            r = minus ? r - t : r + t;
        }
        return r;
    }

    OperatorSymbol term() {
        OperatorSymbol r = unary();
        while (peek().kind == Tok::star) {
            next();
            r = r * unary();
        }
        return r;
    }

    OperatorSymbol unary() {
        if (peek().kind == Tok::minus) {
            next();
            return -unary();
        }
        if (peek().kind == Tok::plus) {
            next();
            return unary();
        }
        return power();
    }

    OperatorSymbol power() {
        OperatorSymbol base = primary();
        if (peek().kind != Tok::caret) return base;
        next();
        const Token& t = next();
        if (t.kind != Tok::number || !t.integral || t.number < 0)
            throw ParseError("exponent must be a nonnegative integer literal", t.pos);
        if (t.number > kMaxPower) throw ParseError("exponent too large", t.pos);
        return base.pow(static_cast<int>(t.number));
    }

    OperatorSymbol primary() {
        const Token& t = next();
        switch (t.kind) {
            case Tok::number: return OperatorSymbol::constant(n_, t.number);
            case Tok::imag: return OperatorSymbol::constant(n_, kI);
            case Tok::var:
                if (t.index > n_)
                    throw ParseError("variable d" + std::to_string(t.index) + " exceeds n = " + std::to_string(n_),
                                     t.pos);
                return OperatorSymbol::variable(n_, t.index);
            case Tok::lparen: {
                OperatorSymbol r = expr();
                if (peek().kind != Tok::rparen) throw ParseError("expected ')'", peek().pos);
                next();
                return r;
            }
            case Tok::end: throw ParseError("unexpected end of input", t.pos);
            default: throw ParseError("expected operand", t.pos);
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int n_;
};

}  // namespace

OperatorSymbol parse_operator(std::string_view text, std::optional<int> n) {
    auto toks = lex(text);
    int dim = 1;
    if (n) {
        if (*n < 0) throw std::invalid_argument("n must be nonnegative");
        dim = *n;
    } else {
        for (const auto& t : toks)
            if (t.kind == Tok::var) dim = std::max(dim, t.index);
    }
    return Parser(std::move(toks), dim).parse();
}

}  // namespace evolv
