#include <algorithm>

#include "tydb/env.hpp"
#include "tydb/lexer.hpp"
#include "tydb/parser.hpp"

namespace tydb {

namespace {

[[noreturn]] void fail_at(const std::vector<LocId>& at, const LocTable& locs, const std::string& msg) {
  if (at.empty()) throw SourceError("", Span{}, msg);
  const Loc& l = locs[at.front()];
  throw SourceError(l.file, l.span, msg);
}

const char* const kPrelude = R"(class Eq a
class Ord a
class Show a
class Enum a
class Num a
class Real a
class Integral a
class Fractional a
class Floating a

instance Eq Int
instance Eq Integer
instance Eq Float
instance Eq Double
instance Eq Char
instance Eq Bool
instance Eq ()
instance Eq a => Eq [a]
instance (Eq a, Eq b) => Eq (a, b)
instance (Eq a, Eq b, Eq c) => Eq (a, b, c)
instance Ord Int
instance Ord Integer
instance Ord Float
instance Ord Double
instance Ord Char
instance Ord Bool
instance Ord ()
instance Ord a => Ord [a]
instance (Ord a, Ord b) => Ord (a, b)
instance (Ord a, Ord b, Ord c) => Ord (a, b, c)
instance Show Int
instance Show Integer
instance Show Float
instance Show Double
instance Show Char
instance Show Bool
instance Show ()
instance Show a => Show [a]
instance (Show a, Show b) => Show (a, b)
instance (Show a, Show b, Show c) => Show (a, b, c)
instance Enum Int
instance Enum Integer
instance Enum Float
instance Enum Double
instance Enum Char
instance Enum Bool
instance Num Int
instance Num Integer
instance Num Float
instance Num Double
instance Real Int
instance Real Integer
instance Real Float
instance Real Double
instance Integral Int
instance Integral Integer
instance Fractional Float
instance Fractional Double
instance Floating Float
instance Floating Double

(+), (-), (*) :: Num a => a -> a -> a
negate, abs, signum :: Num a => a -> a
fromInteger :: Num a => Integer -> a
(/) :: Fractional a => a -> a -> a
recip :: Fractional a => a -> a
div, mod, quot, rem :: Integral a => a -> a -> a
(^) :: (Num a, Integral b) => a -> b -> a
sqrt, exp, log, sin, cos :: Floating a => a -> a
pi :: Floating a => a
(<), (>), (<=), (>=) :: Ord a => a -> a -> Bool
max, min :: Ord a => a -> a -> a
(==), (/=) :: Eq a => a -> a -> Bool
(&&), (||) :: Bool -> Bool -> Bool
not :: Bool -> Bool
otherwise :: Bool
fromIntegral :: (Integral a, Num b) => a -> b
realToFrac :: (Real a, Fractional b) => a -> b
toInteger :: Integral a => a -> Integer
truncate, round, floor, ceiling :: (Fractional a, Integral b) => a -> b
(++) :: [a] -> [a] -> [a]
(:) :: a -> [a] -> [a]
(!!) :: [a] -> Int -> a
(.) :: (b -> c) -> (a -> b) -> a -> c
($) :: (a -> b) -> a -> b
seq :: a -> b -> b
id :: a -> a
const :: a -> b -> a
flip :: (a -> b -> c) -> b -> a -> c
fst :: (a, b) -> a
snd :: (a, b) -> b
map :: (a -> b) -> [a] -> [b]
filter :: (a -> Bool) -> [a] -> [a]
concatMap :: (a -> [b]) -> [a] -> [b]
concat :: [[a]] -> [a]
foldr :: (a -> b -> b) -> b -> [a] -> b
foldl :: (b -> a -> b) -> b -> [a] -> b
length :: [a] -> Int
head :: [a] -> a
tail :: [a] -> [a]
last :: [a] -> a
init :: [a] -> [a]
null :: [a] -> Bool
take, drop :: Int -> [a] -> [a]
replicate :: Int -> a -> [a]
zip :: [a] -> [b] -> [(a, b)]
zipWith :: (a -> b -> c) -> [a] -> [b] -> [c]
unzip :: [(a, b)] -> ([a], [b])
sum, product :: Num a => [a] -> a
maximum, minimum :: Ord a => [a] -> a
and, or :: [Bool] -> Bool
any, all :: (a -> Bool) -> [a] -> Bool
elem, notElem :: Eq a => a -> [a] -> Bool
lines, words :: String -> [String]
unlines, unwords :: [String] -> String
show :: Show a => a -> String
print :: Show a => a -> IO ()
putStr, putStrLn :: String -> IO ()
undefined :: a
error :: String -> a
enumFrom :: Enum a => a -> [a]
enumFromThen :: Enum a => a -> a -> [a]
enumFromTo :: Enum a => a -> a -> [a]
enumFromThenTo :: Enum a => a -> a -> a -> [a]
True, False :: Bool
data Maybe a
Nothing :: Maybe a
Just :: a -> Maybe a
)";

}  // namespace

TypePtr convert_type(const ast::TypeExpr& t, TypeConversion& conv, const Env& env, const LocTable& locs) {
  using K = ast::TypeExpr::Kind;
  switch (t.kind) {
    case K::Wildcard: {
      int id = conv.next_var++;
      conv.wildcards.insert(id);
      return tvar(id);
    }
    case K::Var: {
      auto it = conv.vars.find(t.name);
      if (it != conv.vars.end()) return it->second;
      TypePtr v = conv.rigid ? trigid(t.name) : tvar(conv.next_var++);
      conv.vars.emplace(t.name, v);
      return v;
    }
    case K::Con: break;
  }
  if (t.name == "String" && t.args.empty()) return tlist(tcon("Char"));
  auto arity = env.tycons.arity(t.name);
  if (!arity) fail_at(t.locs, locs, "unknown type constructor '" + t.name + "'");
  if (static_cast<size_t>(*arity) != t.args.size()) {
    fail_at(t.locs, locs,
            "type constructor '" + t.name + "' expects " + std::to_string(*arity) + " argument(s), got " +
                std::to_string(t.args.size()));
  }
  std::vector<TypePtr> args;
  for (const auto& a : t.args) args.push_back(convert_type(a, conv, env, locs));
  return tcon(t.name, std::move(args));
}

ClassAtom convert_atom(const ast::AtomExpr& a, TypeConversion& conv, const Env& env, const LocTable& locs) {
  auto it = env.classes.find(a.cls);
  if (it == env.classes.end()) fail_at(a.locs, locs, "unknown class '" + a.cls + "'");
  if (static_cast<size_t>(it->second) != a.args.size()) {
    fail_at(a.locs, locs,
            "class '" + a.cls + "' expects " + std::to_string(it->second) + " argument(s), got " +
                std::to_string(a.args.size()));
  }
  ClassAtom out{a.cls, {}};
  for (const auto& t : a.args) out.args.push_back(convert_type(t, conv, env, locs));
  return out;
}

TypeScheme convert_scheme(const ast::SchemeExpr& s, TypeConversion& conv, const Env& env, const LocTable& locs) {
  TypeScheme out;
  // Body first so variable ids follow the written order of the type.
  out.body = convert_type(s.body, conv, env, locs);
  for (const auto& a : s.context) out.context.push_back(convert_atom(a, conv, env, locs));
  return out;
}

void add_declarations(Env& env, const ast::Module& m, const LocTable& locs, bool signatures) {
  for (const auto& d : m.decls) {
    if (const auto* data = std::get_if<ast::DataDecl>(&d.node)) {
      env.tycons.declare(data->name, static_cast<int>(data->vars.size()));
    }
  }
  for (const auto& d : m.decls) {
    if (const auto* c = std::get_if<ast::ClassDecl>(&d.node)) {
      if (env.classes.count(c->name)) throw SourceError(locs[c->loc].file, d.span, "duplicate class '" + c->name + "'");
      env.classes[c->name] = static_cast<int>(c->vars.size());
    }
  }
  for (const auto& d : m.decls) {
    if (const auto* c = std::get_if<ast::ClassDecl>(&d.node)) {
      for (const auto& sig : c->methods) {
        TypeConversion conv;
        TypeScheme s = convert_scheme(sig.type, conv, env, locs);
        ClassAtom self{c->name, {}};
        for (const auto& v : c->vars) {
          auto it = conv.vars.find(v);
          if (it == conv.vars.end()) {
            TypePtr fresh = tvar(conv.next_var++);
            conv.vars.emplace(v, fresh);
            self.args.push_back(fresh);
          } else {
            self.args.push_back(it->second);
          }
        }
        s.context.insert(s.context.begin(), self);
        for (const auto& n : sig.names) env.globals[n] = s;
      }
    } else if (const auto* inst = std::get_if<ast::InstanceDecl>(&d.node)) {
      TypeConversion conv;
      Instance i;
      i.head = convert_atom(inst->head, conv, env, locs);
      for (const auto& a : inst->context) i.context.push_back(convert_atom(a, conv, env, locs));
      env.instances.push_back(std::move(i));
    } else if (const auto* rule = std::get_if<ast::RuleDecl>(&d.node)) {
      TypeConversion conv;
      PropRule r;
      r.id = rule->text;
      r.falsity = rule->falsity;
      for (const auto& h : rule->heads) r.heads.push_back(convert_atom(h, conv, env, locs));
      size_t head_vars = conv.vars.size();
      for (const auto& [l, rt] : rule->equations) {
        r.equations.emplace_back(convert_type(l, conv, env, locs), convert_type(rt, conv, env, locs));
      }
      if (conv.vars.size() != head_vars || !conv.wildcards.empty()) {
        throw SourceError(locs[rule->loc].file, d.span, "rule body mentions a variable that no head binds");
      }
      env.rules.push_back(std::move(r));
    } else if (const auto* sig = std::get_if<ast::SigDecl>(&d.node); sig && signatures) {
      TypeConversion conv;
      TypeScheme s = convert_scheme(sig->type, conv, env, locs);
      for (const auto& n : sig->names) env.globals[n] = s;
    }
  }
}

const std::string& default_prelude_text() {
  static const std::string text = kPrelude;
  return text;
}

Env load_prelude(const std::string& text, const std::string& file) {
  LocTable locs;
  auto toks = tokenize(file, text, locs);
  ast::Module m = parse_program(toks, file);
  for (const auto& d : m.decls) {
    if (std::holds_alternative<ast::FunDecl>(d.node) || std::holds_alternative<ast::PatDecl>(d.node) ||
        std::holds_alternative<ast::QueryDecl>(d.node)) {
      throw SourceError(file, d.span, "the prelude may only contain declarations and signatures");
    }
  }
  Env env;
  add_declarations(env, m, locs, true);
  return env;
}

bool is_numeric_class(const std::string& cls) {
  return cls == "Num" || cls == "Real" || cls == "Integral" || cls == "Fractional" || cls == "Floating";
}

}  // namespace tydb
