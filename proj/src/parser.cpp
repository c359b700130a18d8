#include "irmerge/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "irmerge/validate.hpp"

namespace irmerge {

namespace {

const char *diag_kind_name(DiagKind k) {
  switch (k) {
    case DiagKind::Syntax: return "syntax error";
    case DiagKind::TypeMismatch: return "type mismatch";
    case DiagKind::UndefinedValue: return "undefined value";
    case DiagKind::DuplicateDefinition: return "duplicate definition";
    case DiagKind::Validation: return "invalid module";
  }
  return "error";
}

enum class Tok : uint8_t {
  Ident,     // bare identifier / keyword / label
  Local,     // %name
  Global,    // @name
  Int,       // integer literal
  Float,     // float literal
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Colon, Comma, Arrow, Assign,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;      // ident text / local/global name (without sigil)
  long long ival = 0;
  double fval = 0.0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      return t;
    }
    char c = src_[pos_];
    switch (c) {
      case '(': advance(); t.kind = Tok::LParen; return t;
      case ')': advance(); t.kind = Tok::RParen; return t;
      case '{': advance(); t.kind = Tok::LBrace; return t;
      case '}': advance(); t.kind = Tok::RBrace; return t;
      case '[': advance(); t.kind = Tok::LBracket; return t;
      case ']': advance(); t.kind = Tok::RBracket; return t;
      case ':': advance(); t.kind = Tok::Colon; return t;
      case ',': advance(); t.kind = Tok::Comma; return t;
      case '=': advance(); t.kind = Tok::Assign; return t;
      default: break;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      t.kind = Tok::Arrow;
      return t;
    }
    if (c == '%' || c == '@') {
      advance();
      t.kind = (c == '%') ? Tok::Local : Tok::Global;
      t.text = lex_ident_body();
      if (t.text.empty()) t.kind = Tok::End, error_ = "empty name after sigil";
      return t;
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return lex_number(t);
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
      t.kind = Tok::Ident;
      t.text = lex_ident_body();
      return t;
    }
    error_ = std::string("unexpected character '") + c + "'";
    t.kind = Tok::End;
    return t;
  }

  const std::string &error() const { return error_; }

 private:
  void advance() {
    if (pos_ < src_.size()) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string lex_ident_body() {
    std::string s;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
        s.push_back(c);
        advance();
      } else {
        break;
      }
    }
    return s;
  }

  Token lex_number(Token t) {
    size_t start = pos_;
    if (src_[pos_] == '-') advance();
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    bool is_float = false;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_float = true;
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      // exponent form shows up when printing doubles; accept it on input
      size_t save = pos_;
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        is_float = true;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      } else {
        pos_ = save;  // 'e' belongs to a following ident, not this number
      }
    }
    std::string text(src_.substr(start, pos_ - start));
    if (is_float) {
      t.kind = Tok::Float;
      t.fval = std::strtod(text.c_str(), nullptr);
    } else {
      t.kind = Tok::Int;
      t.ival = std::strtoll(text.c_str(), nullptr, 10);
    }
    return t;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  std::string error_;
};

// Unresolved operand as written in the source; types are attached during the
// per-function resolution pass.
struct RawOperand {
  enum class Kind { Local, Int, Float } kind;
  std::string name;
  long long ival = 0;
  double fval = 0.0;
  int line = 0, col = 0;
};

struct RawPhiIncoming {
  RawOperand value;
  std::string pred;
};

struct RawInstr {
  Instruction instr;                  // partially filled (op, type, labels, ...)
  std::vector<RawOperand> raw_ops;    // to be resolved
  std::vector<RawPhiIncoming> raw_incomings;
  IrType src_type = IrType::I32;      // casts: stated source type
  int line = 0, col = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { bump(); }

  ParseResult run() {
    while (cur_.kind != Tok::End && !fatal_) {
      if (cur_.kind == Tok::Ident && cur_.text == "mem") {
        parse_memdecl();
      } else if (cur_.kind == Tok::Ident && cur_.text == "func") {
        parse_funcdef();
      } else {
        syntax_error("expected 'mem' or 'func'");
        break;
      }
    }
    if (!lex_.error().empty())
      diag(DiagKind::Syntax, cur_.line, cur_.col, lex_.error());
    if (result_.diags.empty()) resolve_calls();
    if (result_.diags.empty()) {
      for (const auto &v : validate(result_.module))
        diag(DiagKind::Validation, 0, 0, v);
    }
    return std::move(result_);
  }

 private:
  void bump() { cur_ = lex_.next(); }

  void diag(DiagKind k, int line, int col, const std::string &msg) {
    result_.diags.push_back({line, col, k, msg});
  }

  void syntax_error(const std::string &msg) {
    diag(DiagKind::Syntax, cur_.line, cur_.col, msg);
    fatal_ = true;
  }

  bool expect(Tok k, const char *what) {
    if (cur_.kind != k) {
      syntax_error(std::string("expected ") + what);
      return false;
    }
    bump();
    return true;
  }

  bool expect_ident(const char *kw) {
    if (cur_.kind != Tok::Ident || cur_.text != kw) {
      syntax_error(std::string("expected '") + kw + "'");
      return false;
    }
    bump();
    return true;
  }

  std::optional<IrType> parse_type() {
    if (cur_.kind != Tok::Ident) {
      syntax_error("expected type");
      return std::nullopt;
    }
    auto t = type_from_name(cur_.text);
    if (!t) {
      syntax_error("unknown type '" + cur_.text + "'");
      return std::nullopt;
    }
    bump();
    return t;
  }

  void parse_memdecl() {
    bump();  // mem
    if (cur_.kind != Tok::Global) {
      syntax_error("expected @name after 'mem'");
      return;
    }
    MemRegion region;
    region.name = cur_.text;
    int line = cur_.line, col = cur_.col;
    bump();
    if (!expect(Tok::Colon, "':'")) return;
    auto t = parse_type();
    if (!t) return;
    if (*t == IrType::Addr) {
      diag(DiagKind::TypeMismatch, line, col, "memory region elements must be scalar, not addr");
      fatal_ = true;
      return;
    }
    region.elem_type = *t;
    if (!expect(Tok::LBracket, "'['")) return;
    if (cur_.kind != Tok::Int || cur_.ival <= 0) {
      syntax_error("expected positive length");
      return;
    }
    region.length = static_cast<size_t>(cur_.ival);
    bump();
    if (!expect(Tok::RBracket, "']'")) return;
    if (result_.module.find_memory(region.name)) {
      diag(DiagKind::DuplicateDefinition, line, col, "duplicate memory @" + region.name);
      fatal_ = true;
      return;
    }
    result_.module.memories.push_back(std::move(region));
  }

  void parse_funcdef() {
    bump();  // func
    if (cur_.kind != Tok::Global) {
      syntax_error("expected @name after 'func'");
      return;
    }
    IrFunction fn;
    fn.name = cur_.text;
    int fline = cur_.line, fcol = cur_.col;
    bump();
    if (!expect(Tok::LParen, "'('")) return;
    std::set<std::string> param_names;
    while (cur_.kind != Tok::RParen) {
      if (!fn.params.empty() && !expect(Tok::Comma, "','")) return;
      if (cur_.kind != Tok::Local) {
        syntax_error("expected %param");
        return;
      }
      Param p;
      p.name = cur_.text;
      int pline = cur_.line, pcol = cur_.col;
      bump();
      if (!expect(Tok::Colon, "':'")) return;
      auto t = parse_type();
      if (!t) return;
      p.type = *t;
      if (!param_names.insert(p.name).second) {
        diag(DiagKind::DuplicateDefinition, pline, pcol, "duplicate parameter %" + p.name);
        fatal_ = true;
        return;
      }
      fn.params.push_back(std::move(p));
    }
    bump();  // )
    if (!expect(Tok::Arrow, "'->'")) return;
    auto rt = parse_type();
    if (!rt) return;
    fn.ret_type = *rt;
    if (!expect(Tok::LBrace, "'{'")) return;

    std::vector<std::vector<RawInstr>> raw_blocks;
    std::set<std::string> block_labels;
    while (cur_.kind != Tok::RBrace && cur_.kind != Tok::End && !fatal_) {
      // block := IDENT ":" instr+
      if (cur_.kind != Tok::Ident) {
        syntax_error("expected block label");
        return;
      }
      BasicBlock bb;
      bb.label = cur_.text;
      if (!block_labels.insert(bb.label).second) {
        diag(DiagKind::DuplicateDefinition, cur_.line, cur_.col,
             "duplicate block label '" + bb.label + "' in @" + fn.name);
        fatal_ = true;
        return;
      }
      bump();
      if (!expect(Tok::Colon, "':'")) return;
      std::vector<RawInstr> raw;
      while (!fatal_ && cur_.kind != Tok::RBrace &&
             !(cur_.kind == Tok::Ident && peek_is_block_start())) {
        auto ri = parse_instr();
        if (fatal_) return;
        raw.push_back(std::move(ri));
      }
      if (raw.empty()) {
        syntax_error("empty block '" + bb.label + "'");
        return;
      }
      fn.blocks.push_back(std::move(bb));
      raw_blocks.push_back(std::move(raw));
    }
    if (!expect(Tok::RBrace, "'}'")) return;
    if (fn.blocks.empty()) {
      diag(DiagKind::Syntax, fline, fcol, "function @" + fn.name + " has no blocks");
      fatal_ = true;
      return;
    }
    if (result_.module.find_function(fn.name)) {
      diag(DiagKind::DuplicateDefinition, fline, fcol, "duplicate function @" + fn.name);
      fatal_ = true;
      return;
    }
    resolve_function(fn, raw_blocks);
    result_.module.functions.push_back(std::move(fn));
  }

  // A bare ident starts a new block iff followed by ':'. Opcodes are idents
  // too, so look ahead one token.
  bool peek_is_block_start() {
    Lexer probe = lex_;
    Token t = probe.next();
    return t.kind == Tok::Colon;
  }

  RawOperand parse_raw_operand() {
    RawOperand ro;
    ro.line = cur_.line;
    ro.col = cur_.col;
    if (cur_.kind == Tok::Local) {
      ro.kind = RawOperand::Kind::Local;
      ro.name = cur_.text;
      bump();
    } else if (cur_.kind == Tok::Int) {
      ro.kind = RawOperand::Kind::Int;
      ro.ival = cur_.ival;
      bump();
    } else if (cur_.kind == Tok::Float) {
      ro.kind = RawOperand::Kind::Float;
      ro.fval = cur_.fval;
      bump();
    } else {
      syntax_error("expected value or constant operand");
    }
    return ro;
  }

  std::string parse_label() {
    if (cur_.kind != Tok::Ident) {
      syntax_error("expected block label");
      return {};
    }
    std::string l = cur_.text;
    bump();
    return l;
  }

  RawInstr parse_instr() {
    RawInstr ri;
    ri.line = cur_.line;
    ri.col = cur_.col;
    Instruction &in = ri.instr;

    if (cur_.kind == Tok::Local) {
      in.result = cur_.text;
      bump();
      if (!expect(Tok::Assign, "'='")) return ri;
    }
    if (cur_.kind != Tok::Ident) {
      syntax_error("expected opcode");
      return ri;
    }
    auto op = opcode_from_name(cur_.text);
    if (!op) {
      syntax_error("unknown opcode '" + cur_.text + "'");
      return ri;
    }
    in.op = *op;
    bump();

    switch (in.op) {
      case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::SDiv:
      case Opcode::FAdd: case Opcode::FSub: case Opcode::FMul: case Opcode::FDiv:
      case Opcode::And: case Opcode::Or: case Opcode::Xor:
      case Opcode::Shl: case Opcode::LShr: case Opcode::AShr: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        ri.raw_ops.push_back(parse_raw_operand());
        break;
      }
      case Opcode::ICmp: case Opcode::FCmp: {
        if (cur_.kind != Tok::Ident) {
          syntax_error("expected predicate");
          return ri;
        }
        auto p = predicate_from_name(cur_.text);
        if (!p) {
          syntax_error("unknown predicate '" + cur_.text + "'");
          return ri;
        }
        in.pred = *p;
        bump();
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;  // operand type; result is i1
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        ri.raw_ops.push_back(parse_raw_operand());
        break;
      }
      case Opcode::SExt: case Opcode::ZExt: case Opcode::Trunc: {
        auto st = parse_type();
        if (!st) return ri;
        ri.src_type = *st;
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect_ident("to")) return ri;
        auto dt = parse_type();
        if (!dt) return ri;
        in.type = *dt;
        break;
      }
      case Opcode::Select: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        ri.raw_ops.push_back(parse_raw_operand());
        break;
      }
      case Opcode::Load: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        ri.raw_ops.push_back(parse_raw_operand());
        break;
      }
      case Opcode::Store: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        ri.raw_ops.push_back(parse_raw_operand());
        break;
      }
      case Opcode::Alloca: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        break;
      }
      case Opcode::Gep: {
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;  // index type
        ri.raw_ops.push_back(parse_raw_operand());
        break;
      }
      case Opcode::Br: {
        in.labels.push_back(parse_label());
        break;
      }
      case Opcode::CondBr: {
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        in.labels.push_back(parse_label());
        if (!expect(Tok::Comma, "','")) return ri;
        in.labels.push_back(parse_label());
        break;
      }
      case Opcode::Switch: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        ri.raw_ops.push_back(parse_raw_operand());
        if (!expect(Tok::Comma, "','")) return ri;
        in.labels.push_back(parse_label());  // default
        if (!expect(Tok::LBracket, "'['")) return ri;
        while (cur_.kind != Tok::RBracket) {
          if (in.labels.size() > 1 && !expect(Tok::Comma, "','")) return ri;
          if (cur_.kind != Tok::Int) {
            syntax_error("expected case constant");
            return ri;
          }
          in.case_values.push_back(cur_.ival);
          bump();
          if (!expect(Tok::Colon, "':'")) return ri;
          in.labels.push_back(parse_label());
        }
        bump();  // ]
        break;
      }
      case Opcode::Phi: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        bool first = true;
        while (first || cur_.kind == Tok::Comma) {
          if (!first) bump();  // ,
          first = false;
          if (!expect(Tok::LBracket, "'['")) return ri;
          RawPhiIncoming inc;
          inc.value = parse_raw_operand();
          if (!expect(Tok::Comma, "','")) return ri;
          inc.pred = parse_label();
          if (!expect(Tok::RBracket, "']'")) return ri;
          ri.raw_incomings.push_back(std::move(inc));
        }
        if (ri.raw_incomings.size() < 2) {
          syntax_error("phi needs at least two incoming pairs");
          return ri;
        }
        break;
      }
      case Opcode::Ret: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        ri.raw_ops.push_back(parse_raw_operand());
        break;
      }
      case Opcode::Call: {
        auto t = parse_type();
        if (!t) return ri;
        in.type = *t;
        if (cur_.kind != Tok::Global) {
          syntax_error("expected @callee");
          return ri;
        }
        in.callee = cur_.text;
        bump();
        if (!expect(Tok::LParen, "'('")) return ri;
        while (cur_.kind != Tok::RParen) {
          if (!ri.raw_ops.empty() && !expect(Tok::Comma, "','")) return ri;
          ri.raw_ops.push_back(parse_raw_operand());
        }
        bump();  // )
        break;
      }
    }
    return ri;
  }

  // ---- resolution & typing -------------------------------------------------

  void type_error(int line, int col, const std::string &msg) {
    diag(DiagKind::TypeMismatch, line, col, msg);
  }

  void resolve_function(IrFunction &fn, std::vector<std::vector<RawInstr>> &raw_blocks) {
    std::map<std::string, IrType> defs;
    for (const auto &p : fn.params) defs[p.name] = p.type;

    // pass 1: collect result definitions
    for (size_t bi = 0; bi < raw_blocks.size(); ++bi) {
      for (auto &ri : raw_blocks[bi]) {
        Instruction &in = ri.instr;
        if (!in.has_result()) continue;
        IrType rt = result_type(ri);
        auto [it, inserted] = defs.emplace(in.result, rt);
        (void)it;
        if (!inserted) {
          diag(DiagKind::DuplicateDefinition, ri.line, ri.col,
               "duplicate definition of %" + in.result + " in @" + fn.name);
          return;
        }
      }
    }

    // pass 2: resolve operands and check types
    for (size_t bi = 0; bi < raw_blocks.size(); ++bi) {
      for (auto &ri : raw_blocks[bi]) {
        if (!resolve_instr(fn, defs, ri)) return;
        size_t idx = fn.blocks[bi].instrs.size();
        bool is_call = ri.instr.op == Opcode::Call;
        fn.blocks[bi].instrs.push_back(std::move(ri.instr));
        if (is_call)
          pending_calls_.push_back(
              {fn.name, bi, idx, std::move(ri.raw_ops), defs, ri.line, ri.col});
      }
    }
  }

  static IrType result_type(const RawInstr &ri) {
    switch (ri.instr.op) {
      case Opcode::ICmp:
      case Opcode::FCmp: return IrType::I1;
      case Opcode::Alloca:
      case Opcode::Gep: return IrType::Addr;
      default: return ri.instr.type;
    }
  }

  bool resolve_operand(const std::map<std::string, IrType> &defs, RawOperand &ro,
                       IrType want, Operand &out) {
    switch (ro.kind) {
      case RawOperand::Kind::Local: {
        auto it = defs.find(ro.name);
        if (it == defs.end()) {
          diag(DiagKind::UndefinedValue, ro.line, ro.col, "undefined value %" + ro.name);
          return false;
        }
        if (it->second != want) {
          type_error(ro.line, ro.col, "%" + ro.name + " has type " +
                                          type_name(it->second) + ", expected " +
                                          type_name(want));
          return false;
        }
        out = Operand::value(ro.name, want);
        return true;
      }
      case RawOperand::Kind::Int:
        if (!is_int_type(want)) {
          type_error(ro.line, ro.col, std::string("integer constant where ") +
                                          type_name(want) + " expected");
          return false;
        }
        if (want == IrType::I1 && ro.ival != 0 && ro.ival != 1) {
          type_error(ro.line, ro.col, "i1 constant must be 0 or 1");
          return false;
        }
        out = Operand::const_int(ro.ival, want);
        return true;
      case RawOperand::Kind::Float:
        if (!is_float_type(want)) {
          type_error(ro.line, ro.col, std::string("float constant where ") +
                                          type_name(want) + " expected");
          return false;
        }
        out = Operand::const_float(ro.fval, want);
        return true;
    }
    return false;
  }

  bool resolve_ops(const std::map<std::string, IrType> &defs, RawInstr &ri,
                   const std::vector<IrType> &want) {
    Instruction &in = ri.instr;
    in.operands.resize(want.size());
    for (size_t i = 0; i < want.size(); ++i)
      if (!resolve_operand(defs, ri.raw_ops[i], want[i], in.operands[i])) return false;
    return true;
  }

  bool resolve_instr(const IrFunction &fn, const std::map<std::string, IrType> &defs,
                     RawInstr &ri) {
    Instruction &in = ri.instr;
    const int ln = ri.line, cl = ri.col;
    auto require = [&](bool cond, const std::string &msg) {
      if (!cond) type_error(ln, cl, msg);
      return cond;
    };

    switch (in.op) {
      case Opcode::Add: case Opcode::Sub: case Opcode::Mul: case Opcode::SDiv:
        if (!require(in.type == IrType::I32 || in.type == IrType::I64,
                     std::string(opcode_name(in.op)) + " requires i32 or i64"))
          return false;
        return resolve_ops(defs, ri, {in.type, in.type});
      case Opcode::Shl: case Opcode::LShr: case Opcode::AShr:
        if (!require(in.type == IrType::I32 || in.type == IrType::I64,
                     std::string(opcode_name(in.op)) + " requires i32 or i64"))
          return false;
        return resolve_ops(defs, ri, {in.type, in.type});
      case Opcode::And: case Opcode::Or: case Opcode::Xor:
        if (!require(is_int_type(in.type),
                     std::string(opcode_name(in.op)) + " requires an integer type"))
          return false;
        return resolve_ops(defs, ri, {in.type, in.type});
      case Opcode::FAdd: case Opcode::FSub: case Opcode::FMul: case Opcode::FDiv:
        if (!require(is_float_type(in.type),
                     std::string(opcode_name(in.op)) + " requires f32 or f64"))
          return false;
        return resolve_ops(defs, ri, {in.type, in.type});
      case Opcode::ICmp:
        if (!require(is_int_type(in.type), "icmp requires an integer type")) return false;
        if (!require(in.pred >= Predicate::Eq && in.pred <= Predicate::Uge,
                     "icmp requires an integer predicate"))
          return false;
        return resolve_ops(defs, ri, {in.type, in.type});
      case Opcode::FCmp:
        if (!require(is_float_type(in.type), "fcmp requires f32 or f64")) return false;
        if (!require(in.pred >= Predicate::OEq, "fcmp requires a float predicate"))
          return false;
        return resolve_ops(defs, ri, {in.type, in.type});
      case Opcode::SExt: case Opcode::ZExt: {
        if (!require(is_int_type(ri.src_type) && is_int_type(in.type) &&
                         int_bits(ri.src_type) < int_bits(in.type),
                     std::string(opcode_name(in.op)) + " must widen an integer type"))
          return false;
        return resolve_ops(defs, ri, {ri.src_type});
      }
      case Opcode::Trunc:
        if (!require(is_int_type(ri.src_type) && is_int_type(in.type) &&
                         int_bits(ri.src_type) > int_bits(in.type),
                     "trunc must narrow an integer type"))
          return false;
        return resolve_ops(defs, ri, {ri.src_type});
      case Opcode::Select:
        return resolve_ops(defs, ri, {IrType::I1, in.type, in.type});
      case Opcode::Load:
        if (!require(in.type != IrType::Addr, "load of addr is not supported")) return false;
        return resolve_ops(defs, ri, {IrType::Addr});
      case Opcode::Store:
        if (!require(in.type != IrType::Addr, "store of addr is not supported")) return false;
        return resolve_ops(defs, ri, {in.type, IrType::Addr});
      case Opcode::Alloca:
        return require(in.type != IrType::Addr, "alloca element must be scalar");
      case Opcode::Gep:
        if (!require(in.type == IrType::I32 || in.type == IrType::I64,
                     "gep index must be i32 or i64"))
          return false;
        return resolve_ops(defs, ri, {IrType::Addr, in.type});
      case Opcode::Br:
        return true;
      case Opcode::CondBr:
        return resolve_ops(defs, ri, {IrType::I1});
      case Opcode::Switch: {
        if (!require(in.type == IrType::I32 || in.type == IrType::I64,
                     "switch value must be i32 or i64"))
          return false;
        std::set<long long> seen;
        for (long long c : in.case_values)
          if (!seen.insert(c).second)
            return require(false, "duplicate switch case value " + std::to_string(c));
        return resolve_ops(defs, ri, {in.type});
      }
      case Opcode::Phi: {
        for (auto &rin : ri.raw_incomings) {
          PhiIncoming inc;
          if (!resolve_operand(defs, rin.value, in.type, inc.value)) return false;
          inc.pred = rin.pred;
          in.incomings.push_back(std::move(inc));
        }
        std::set<std::string> preds;
        for (const auto &inc : in.incomings)
          if (!preds.insert(inc.pred).second)
            return require(false, "phi has duplicate incoming block '" + inc.pred + "'");
        return true;
      }
      case Opcode::Ret:
        if (!require(in.type == fn.ret_type,
                     std::string("ret type ") + type_name(in.type) +
                         " does not match function return type " + type_name(fn.ret_type)))
          return false;
        return resolve_ops(defs, ri, {in.type});
      case Opcode::Call:
        // operands typed against the callee signature in resolve_calls,
        // after every function definition is available
        return true;
    }
    return false;
  }

  struct PendingCall {
    std::string fn;
    size_t block = 0, idx = 0;
    std::vector<RawOperand> raw_ops;
    std::map<std::string, IrType> defs;
    int line = 0, col = 0;
  };

  // Calls are resolved after every function is parsed so forward references
  // and mutual calls work.
  void resolve_calls() {
    for (auto &pc : pending_calls_) {
      Instruction &in =
          result_.module.find_function(pc.fn)->blocks[pc.block].instrs[pc.idx];
      const IrFunction *callee = result_.module.find_function(in.callee);
      if (!callee) {
        diag(DiagKind::UndefinedValue, pc.line, pc.col, "undefined function @" + in.callee);
        continue;
      }
      if (callee->ret_type != in.type) {
        type_error(pc.line, pc.col, "call type does not match @" + in.callee + " return type");
        continue;
      }
      if (pc.raw_ops.size() != callee->params.size()) {
        type_error(pc.line, pc.col, "call to @" + in.callee + " expects " +
                                        std::to_string(callee->params.size()) + " arguments");
        continue;
      }
      in.operands.resize(pc.raw_ops.size());
      for (size_t a = 0; a < pc.raw_ops.size(); ++a)
        if (!resolve_operand(pc.defs, pc.raw_ops[a], callee->params[a].type, in.operands[a]))
          break;
    }
  }

 private:
  std::vector<PendingCall> pending_calls_;
  Lexer lex_;
  Token cur_;
  bool fatal_ = false;
  ParseResult result_;
};

}  // namespace

std::string Diag::to_string() const {
  std::ostringstream os;
  if (line > 0) os << line << ":" << col << ": ";
  os << diag_kind_name(kind) << ": " << message;
  return os.str();
}

std::string ParseResult::diag_text() const {
  std::string out;
  for (const auto &d : diags) {
    out += d.to_string();
    out += '\n';
  }
  return out;
}

ParseResult parse_module(std::string_view text) {
  Parser p(text);
  return p.run();
}

ParseResult parse_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.diags.push_back({0, 0, DiagKind::Syntax, "cannot open file: " + path});
    return r;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_module(ss.str());
}

}  // namespace irmerge
