#pragma once

#include "tydb/ast.hpp"

namespace tydb {

// Rewrites the module in place into the core subset: no EOp, ENeg,
// ESection, EEnum or EComp nodes, no guards and no `where` (each Rhs keeps
// only `plain`). Synthesized nodes carry the Locs of the construct they
// replace.
void desugar(ast::Module& m);
void desugar(ast::ExprPtr& e);

}  // namespace tydb
