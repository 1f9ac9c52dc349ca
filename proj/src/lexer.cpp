#include "tydb/lexer.hpp"

#include <array>
#include <cctype>

namespace tydb {

namespace {

constexpr std::array kKeywords = {"let", "in", "where", "if", "then", "else",
                                  "class", "instance", "rule", "data"};
constexpr std::array kReservedOps = {"=", "|", "<-", "->", "=>", "==>", "::", "::?", "..", "\\"};

bool is_symbol_char(char c) {
  switch (c) {
    case '!': case '#': case '$': case '%': case '&': case '*': case '+':
    case '.': case '/': case '<': case '=': case '>': case '?': case '@':
    case '\\': case '^': case '|': case '-': case '~': case ':':
      return true;
    default:
      return false;
  }
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

class Lexer {
 public:
  Lexer(const std::string& file, const std::string& text, LocTable& locs)
      : file_(file), text_(text), locs_(locs) {}

  std::vector<Token> run() {
    while (true) {
      skip_space_and_comments();
      if (pos_ >= text_.size()) break;
      lex_one();
    }
    Token end;
    end.kind = TokKind::End;
    end.span = Span{line_, col_, line_, col_ + 1};
    end.layout_col = 0;
    end.line_start = true;
    out_.push_back(end);
    return std::move(out_);
  }

 private:
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
      lcol_ = 1;
      at_line_start_ = true;
    } else if (text_[pos_] == '\t') {
      ++col_;
      lcol_ = ((lcol_ - 1) / 8 + 1) * 8 + 1;
    } else {
      ++col_;
      ++lcol_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw SourceError(file_, Span{line_, col_, line_, col_ + 1}, msg);
  }

  void skip_space_and_comments() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        // A run of dashes starts a comment unless it is part of a longer operator.
        size_t k = pos_;
        while (k < text_.size() && text_[k] == '-') ++k;
        if (k < text_.size() && is_symbol_char(text_[k])) return;
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (c == '{' && peek(1) == '-') {
        int depth = 0;
        do {
          if (pos_ >= text_.size()) fail("unterminated block comment");
          if (peek() == '{' && peek(1) == '-') {
            ++depth;
            advance();
            advance();
          } else if (peek() == '-' && peek(1) == '}') {
            --depth;
            advance();
            advance();
          } else {
            advance();
          }
        } while (depth > 0);
      } else {
        return;
      }
    }
  }

  void emit(TokKind kind, std::string text, int sline, int scol, int slcol, bool line_start) {
    Token t;
    t.kind = kind;
    t.text = std::move(text);
    t.span = Span{sline, scol, line_, col_};
    t.layout_col = slcol;
    t.line_start = line_start;
    t.loc = locs_.add(file_, t.span);
    out_.push_back(std::move(t));
  }

  void lex_one() {
    const int sline = line_, scol = col_, slcol = lcol_;
    const bool ls = at_line_start_;
    at_line_start_ = false;
    const size_t start = pos_;
    char c = peek();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < text_.size() && is_ident_char(peek())) advance();
      std::string word = text_.substr(start, pos_ - start);
      TokKind kind;
      if (word == "_") kind = TokKind::Wildcard;
      else if (is_keyword(word)) kind = TokKind::Keyword;
      else if (std::isupper(static_cast<unsigned char>(word[0]))) kind = TokKind::ConId;
      else kind = TokKind::VarId;
      emit(kind, std::move(word), sline, scol, slcol, ls);
      return;
    }

    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      TokKind kind = TokKind::Integer;
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        kind = TokKind::Fractional;
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      if ((peek() == 'e' || peek() == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '-' || peek(1) == '+') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        kind = TokKind::Fractional;
        advance();
        if (peek() == '-' || peek() == '+') advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      emit(kind, text_.substr(start, pos_ - start), sline, scol, slcol, ls);
      return;
    }

    if (c == '"') {
      advance();
      std::string value;
      while (true) {
        if (pos_ >= text_.size() || peek() == '\n') {
          throw SourceError(file_, Span{sline, scol, sline, scol + 1}, "unterminated string literal");
        }
        if (peek() == '"') break;
        if (peek() == '\\') {
          advance();
          if (pos_ >= text_.size()) fail("unterminated string literal");
        }
        value.push_back(peek());
        advance();
      }
      advance();
      emit(TokKind::String, text_.substr(start, pos_ - start), sline, scol, slcol, ls);
      return;
    }

    if (c == '\'') {
      advance();
      if (peek() == '\\') advance();
      if (pos_ >= text_.size() || peek() == '\n') fail("unterminated character literal");
      advance();
      if (peek() != '\'') {
        throw SourceError(file_, Span{sline, scol, sline, scol + 1}, "unterminated character literal");
      }
      advance();
      emit(TokKind::Char, text_.substr(start, pos_ - start), sline, scol, slcol, ls);
      return;
    }

    if (c == '`') {
      advance();
      size_t id_start = pos_;
      while (pos_ < text_.size() && is_ident_char(peek())) advance();
      if (pos_ == id_start || peek() != '`') fail("malformed backquoted operator");
      advance();
      emit(TokKind::Operator, text_.substr(start, pos_ - start), sline, scol, slcol, ls);
      return;
    }

    if (c == '(' || c == ')' || c == '[' || c == ']' || c == ',' || c == ';' || c == '{' || c == '}') {
      advance();
      emit(TokKind::Special, std::string(1, c), sline, scol, slcol, ls);
      return;
    }

    if (is_symbol_char(c)) {
      while (pos_ < text_.size() && is_symbol_char(peek())) advance();
      std::string sym = text_.substr(start, pos_ - start);
      TokKind kind = TokKind::Operator;
      for (const char* r : kReservedOps) {
        if (sym == r) kind = TokKind::ReservedOp;
      }
      emit(kind, std::move(sym), sline, scol, slcol, ls);
      return;
    }

    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& file_;
  const std::string& text_;
  LocTable& locs_;
  std::vector<Token> out_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  int lcol_ = 1;
  bool at_line_start_ = true;
};

}  // namespace

bool is_keyword(std::string_view word) {
  for (const char* k : kKeywords) {
    if (word == k) return true;
  }
  return false;
}

std::vector<Token> tokenize(const std::string& file, const std::string& text, LocTable& locs) {
  return Lexer(file, text, locs).run();
}

}  // namespace tydb
