#include "aptly/lexer.hpp"

#include <algorithm>
#include <array>

namespace aptly {

namespace {

constexpr std::array<std::string_view, 19> kKeywords{
    "initialize", "to", "when", "set", "call", "return", "if", "elif", "else", "for",
    "each",       "in", "while", "global", "and", "or", "not", "True", "False",
};

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }
bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Outcome<std::vector<Token>> run() {
    while (pos_ < src_.size() && diags_.empty()) {
      if (depth_ == 0) {
        if (!start_line()) continue;
      }
      scan_line();
    }
    if (!diags_.empty()) return fail(std::move(diags_));
    if (!tokens_.empty() && tokens_.back().kind != TokenKind::Newline && tokens_.back().kind != TokenKind::Dedent &&
        tokens_.back().kind != TokenKind::Indent) {
      push(TokenKind::Newline, "", here(0));
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      push(TokenKind::Dedent, "", here(0));
    }
    push(TokenKind::Eof, "", here(0));
    return std::move(tokens_);
  }

 private:
  SourceSpan here(std::uint32_t length) const { return SourceSpan{line_, column_, length}; }

  void push(TokenKind kind, std::string text, SourceSpan span) { tokens_.push_back(Token{kind, std::move(text), span}); }

  void error(DiagCode code, std::string message, SourceSpan span) {
    diags_.push_back(make_diag(code, std::move(message), span));
  }

  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }
  bool at_end() const { return pos_ >= src_.size(); }

  // Advances one byte, tracking line and code-point column.
  void advance() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else if (!is_continuation(static_cast<unsigned char>(c))) {
      ++column_;
    }
  }

  // Handles leading whitespace of a logical line. Returns false when the
  // line was blank and has been consumed.
  bool start_line() {
    std::uint32_t width = 0;
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) {
      if (peek() == '\t') {
        error(DiagCode::TabIndent, "tab character in indentation", here(1));
        return false;
      }
      if (peek() == ' ') ++width;
      advance();
    }
    if (at_end()) return false;
    if (peek() == '\n') {
      advance();
      return false;
    }
    if (peek() == '#') {
      error(DiagCode::BadChar, "comments are not supported", here(1));
      return false;
    }
    if (width > indents_.back()) {
      indents_.push_back(width);
      push(TokenKind::Indent, "", SourceSpan{line_, 1, width});
    } else {
      while (width < indents_.back()) {
        indents_.pop_back();
        push(TokenKind::Dedent, "", here(0));
      }
      if (width != indents_.back()) {
        error(DiagCode::Syntax, "dedent does not match any outer indentation level", SourceSpan{line_, 1, width});
        return false;
      }
    }
    return true;
  }

  // Scans tokens up to and including the end of the physical line.
  void scan_line() {
    while (!at_end() && diags_.empty()) {
      const char c = peek();
      if (c == '\n') {
        if (depth_ == 0) push(TokenKind::Newline, "", here(0));
        advance();
        return;
      }
      if (c == ' ' || c == '\r') {
        advance();
        continue;
      }
      if (c == '\t') {
        error(DiagCode::BadChar, "tab character outside a string", here(1));
        return;
      }
      if (is_ident_start(c)) {
        scan_word();
      } else if (is_digit(c)) {
        scan_number();
      } else if (c == '"' || c == '\'') {
        scan_string(c);
      } else if (!scan_punct()) {
        std::string shown = (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) >= 0x7f)
                                ? "byte 0x" + hex(static_cast<unsigned char>(c))
                                : std::string("'") + c + "'";
        error(DiagCode::BadChar, c == '#' ? "comments are not supported" : "unexpected character " + shown,
              here(1));
        return;
      }
    }
  }

  static std::string hex(unsigned char c) {
    constexpr char digits[] = "0123456789abcdef";
    return {digits[c >> 4], digits[c & 0xF]};
  }

  void scan_word() {
    const SourceSpan start = here(0);
    const std::size_t begin = pos_;
    while (!at_end() && is_ident_char(peek())) advance();
    std::string word(src_.substr(begin, pos_ - begin));
    const TokenKind kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
    push(kind, std::move(word), SourceSpan{start.line, start.column, static_cast<std::uint32_t>(pos_ - begin)});
  }

  void scan_number() {
    const SourceSpan start = here(0);
    const std::size_t begin = pos_;
    while (!at_end() && is_digit(peek())) advance();
    if (peek() == '.' && is_digit(peek(1))) {
      advance();
      while (!at_end() && is_digit(peek())) advance();
    }
    push(TokenKind::Number, std::string(src_.substr(begin, pos_ - begin)),
         SourceSpan{start.line, start.column, static_cast<std::uint32_t>(pos_ - begin)});
  }

  void scan_string(char quote) {
    const SourceSpan start = here(0);
    advance();
    std::string value;
    std::uint32_t chars = 1;
    while (true) {
      if (at_end() || peek() == '\n') {
        error(DiagCode::UnterminatedString, "string literal is not terminated", SourceSpan{start.line, start.column, chars});
        return;
      }
      const char c = peek();
      if (c == quote) {
        advance();
        ++chars;
        break;
      }
      if (c == '\\') {
        const SourceSpan esc = here(2);
        advance();
        ++chars;
        if (at_end() || peek() == '\n') continue;  // reported as unterminated
        const char e = peek();
        switch (e) {
          case '"': value += '"'; break;
          case '\'': value += '\''; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default:
            error(DiagCode::BadChar, std::string("unknown escape sequence '\\") + (is_ident_char(e) ? std::string(1, e) : std::string()) + "'", esc);
            return;
        }
        advance();
        ++chars;
        continue;
      }
      value += c;
      if (!is_continuation(static_cast<unsigned char>(c))) ++chars;
      advance();
    }
    push(TokenKind::String, std::move(value), SourceSpan{start.line, start.column, chars});
  }

  bool scan_punct() {
    static constexpr std::array<std::string_view, 4> two{"==", "!=", "<=", ">="};
    const SourceSpan start = here(0);
    for (auto p : two) {
      if (src_.substr(pos_, 2) == p) {
        advance();
        advance();
        push(TokenKind::Punct, std::string(p), SourceSpan{start.line, start.column, 2});
        return true;
      }
    }
    static constexpr std::string_view single = "()[]{},:.=<>+-*/";
    const char c = peek();
    if (single.find(c) == std::string_view::npos) return false;
    if (c == '(' || c == '[' || c == '{') ++depth_;
    if ((c == ')' || c == ']' || c == '}') && depth_ > 0) --depth_;
    advance();
    push(TokenKind::Punct, std::string(1, c), SourceSpan{start.line, start.column, 1});
    return true;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t column_ = 1;
  int depth_ = 0;
  std::vector<std::uint32_t> indents_{0};
  std::vector<Token> tokens_;
  Diagnostics diags_;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

bool is_identifier(std::string_view text) {
  if (text.empty() || !is_ident_start(text.front()) || is_keyword(text)) return false;
  return std::all_of(text.begin(), text.end(), is_ident_char);
}

bool is_number_text(std::string_view text) {
  if (!text.empty() && text.front() == '-') text.remove_prefix(1);
  const auto dot = text.find('.');
  auto digits = [](std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_digit); };
  if (dot == std::string_view::npos) return digits(text);
  return digits(text.substr(0, dot)) && digits(text.substr(dot + 1));
}

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::Number: return "number";
    case TokenKind::String: return "string";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::Newline: return "newline";
    case TokenKind::Indent: return "indent";
    case TokenKind::Dedent: return "dedent";
    case TokenKind::Eof: return "end of input";
  }
  return "?";
}

Outcome<std::vector<Token>> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace aptly
