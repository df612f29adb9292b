#include "repath/logical.hpp"

#include <algorithm>

namespace repath {

std::string OccTable::set_to_string(const std::vector<OccId>& occs) const {
  std::string out = "{";
  for (std::size_t i = 0; i < occs.size(); ++i) {
    if (i) out += ",";
    out += symbol(occs[i]) + "@" + std::to_string(occs[i]);
  }
  return out + "}";
}

std::string LogicalOp::to_string(const OccTable& occs) const {
  if (kind == Kind::Concat) return occs.set_to_string(left) + "-" + occs.set_to_string(right);
  std::string b;
  switch (body) {
    case BodyShape::Symbols: b = occs.set_to_string(base); break;
    case BodyShape::Edge: b = occs.set_to_string(head) + "-" + occs.set_to_string(tail); break;
    case BodyShape::Composite: {
      b = "[";
      for (std::size_t i = 0; i < inner.size(); ++i) {
        if (i) b += "; ";
        b += inner[i].to_string(occs);
      }
      b += "]";
      break;
    }
  }
  return "(" + b + ")+";
}

namespace {

// Stack frame: sub-plan plus its prefix/postfix occurrence sets, i.e.
// head(E) and tail(E) of the sub-expression built so far.
struct Frame {
  enum class Shape : std::uint8_t { SymbolSet, SingleEdge, Complex };
  Shape shape = Shape::SymbolSet;
  std::vector<OccId> prefix, postfix;
  std::vector<LogicalOp> ops;
};

std::vector<OccId> merged(const std::vector<OccId>& a, const std::vector<OccId>& b) {
  std::vector<OccId> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

LogicalPlan gen_logical_ops(const PostfixProgram& program, const RegexAst& ast) {
  LogicalPlan plan;
  plan.occs = OccTable(ast);

  std::vector<Frame> stack;
  auto pop = [&](const char* op) -> Frame {
    if (stack.empty()) throw ArityError(std::string("postfix underflow at '") + op + "'");
    Frame f = std::move(stack.back());
    stack.pop_back();
    return f;
  };

  for (const auto& tok : program) {
    switch (tok.kind) {
      case PostfixToken::Kind::Symbol: {
        Frame f;
        f.shape = Frame::Shape::SymbolSet;
        f.prefix = {tok.occ};
        f.postfix = {tok.occ};
        stack.push_back(std::move(f));
        break;
      }
      case PostfixToken::Kind::Alt: {
        Frame rhs = pop("|");
        Frame lhs = pop("|");
        Frame f;
        f.shape = (lhs.shape == Frame::Shape::SymbolSet && rhs.shape == Frame::Shape::SymbolSet)
                      ? Frame::Shape::SymbolSet
                      : Frame::Shape::Complex;
        f.prefix = merged(lhs.prefix, rhs.prefix);
        f.postfix = merged(lhs.postfix, rhs.postfix);
        f.ops = std::move(lhs.ops);
        f.ops.insert(f.ops.end(), std::make_move_iterator(rhs.ops.begin()),
                     std::make_move_iterator(rhs.ops.end()));
        // a bare-symbol branch alternated with a composite one stays open on
        // both sides; its stubs must self-pair so link composition sees it
        if (f.shape == Frame::Shape::Complex) {
          for (const Frame* side : {&lhs, &rhs}) {
            if (side->shape == Frame::Shape::SymbolSet)
              for (OccId o : side->prefix) plan.self_paired.insert(o);
          }
        }
        stack.push_back(std::move(f));
        break;
      }
      case PostfixToken::Kind::Concat: {
        Frame rhs = pop("-");
        Frame lhs = pop("-");
        LogicalOp op;
        op.kind = LogicalOp::Kind::Concat;
        op.left = lhs.postfix;
        op.right = rhs.prefix;
        Frame f;
        f.shape = (lhs.shape == Frame::Shape::SymbolSet && rhs.shape == Frame::Shape::SymbolSet)
                      ? Frame::Shape::SingleEdge
                      : Frame::Shape::Complex;
        f.prefix = std::move(lhs.prefix);
        f.postfix = std::move(rhs.postfix);
        f.ops = std::move(lhs.ops);
        f.ops.insert(f.ops.end(), std::make_move_iterator(rhs.ops.begin()),
                     std::make_move_iterator(rhs.ops.end()));
        f.ops.push_back(std::move(op));
        stack.push_back(std::move(f));
        break;
      }
      case PostfixToken::Kind::Plus: {
        Frame f = pop("+");
        LogicalOp cl;
        cl.kind = LogicalOp::Kind::Closure;
        if (f.shape == Frame::Shape::SymbolSet) {
          // a+ lowers through copies: Load(a); SelfLink(a,a1,a2); ClosureLink(a1,a2)
          cl.body = LogicalOp::BodyShape::Symbols;
          cl.base = f.prefix;
          for (OccId o : f.prefix) cl.head.push_back(plan.occs.add_copy(o));
          for (OccId o : f.prefix) cl.tail.push_back(plan.occs.add_copy(o));
          f.prefix = cl.head;
          f.postfix = cl.tail;
          f.ops = {std::move(cl)};
        } else if (f.shape == Frame::Shape::SingleEdge) {
          // the body's single concat is absorbed: ClosureLink alternates the
          // two symbol sets directly on the graph
          cl.body = LogicalOp::BodyShape::Edge;
          cl.head = f.prefix;
          cl.tail = f.postfix;
          f.ops = {std::move(cl)};
        } else {
          cl.body = LogicalOp::BodyShape::Composite;
          cl.head = f.prefix;
          cl.tail = f.postfix;
          cl.inner = std::move(f.ops);
          f.ops = {std::move(cl)};
        }
        f.shape = Frame::Shape::Complex;
        stack.push_back(std::move(f));
        break;
      }
    }
  }
  if (stack.size() != 1) throw ArityError("postfix program leaves " +
                                          std::to_string(stack.size()) + " values on the stack");

  Frame top = std::move(stack.back());
  plan.ops = std::move(top.ops);
  plan.query_heads.insert(top.prefix.begin(), top.prefix.end());
  plan.query_tails.insert(top.postfix.begin(), top.postfix.end());
  if (top.shape == Frame::Shape::SymbolSet) {
    // whole query is a (set of) bare symbol(s): every match is a single vertex
    for (OccId o : top.prefix) plan.self_paired.insert(o);
  }
  return plan;
}

LogicalPlan gen_logical_ops(const RegexAst& ast) {
  return gen_logical_ops(to_postfix(ast), ast);
}

namespace {
std::size_t count_ops(const std::vector<LogicalOp>& ops) {
  std::size_t total = 0;
  for (const auto& op : ops) {
    ++total;
    if (op.kind == LogicalOp::Kind::Closure && op.body == LogicalOp::BodyShape::Composite)
      total += count_ops(op.inner);
  }
  return total;
}
}  // namespace

std::size_t count_logical_ops(const LogicalPlan& plan) { return count_ops(plan.ops); }

}  // namespace repath
