#include "entq/graphs.hpp"

#include <algorithm>

#include "entq/unify.hpp"

namespace entq {

int CoordinationGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::vector<std::string>> ComponentsDAG::component_names() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(components.size());
  for (const auto& comp : components) {
    std::vector<std::string> names;
    names.reserve(comp.size());
    for (int v : comp) names.push_back(vertex_names[v]);
    out.push_back(std::move(names));
  }
  return out;
}

ExtendedCoordinationGraph build_extended(const QuerySet& qs) {
  ExtendedCoordinationGraph g;
  for (const auto& q : qs.queries) g.vertices.push_back(q.name);
  const int n = static_cast<int>(qs.queries.size());
  for (int i = 0; i < n; ++i) {
    const auto& posts = qs.queries[i].post;
    for (int p = 0; p < static_cast<int>(posts.size()); ++p) {
      for (int j = 0; j < n; ++j) {
        const auto& heads = qs.queries[j].heads;
        for (int h = 0; h < static_cast<int>(heads.size()); ++h) {
          if (unifiable(posts[p], heads[h])) {
            g.edges.push_back({i, p, j, h});
          }
        }
      }
    }
  }
  return g;
}

CoordinationGraph collapse(const ExtendedCoordinationGraph& g) {
  CoordinationGraph out;
  out.vertices = g.vertices;
  for (const auto& e : g.edges) out.edges.insert({e.from, e.to});
  return out;
}

std::vector<std::string> SafetyReport::unsafe_queries() const {
  std::vector<std::string> out;
  for (const auto& v : violations) {
    if (std::find(out.begin(), out.end(), v.query) == out.end()) {
      out.push_back(v.query);
    }
  }
  return out;
}

SafetyReport check_safety(const ExtendedCoordinationGraph& g) {
  SafetyReport report;
  // Group edges by (source query, post atom index).
  std::map<std::pair<int, int>, std::vector<const ExtendedCoordinationGraph::Edge*>> by_post;
  for (const auto& e : g.edges) by_post[{e.from, e.post_idx}].push_back(&e);
  for (const auto& [key, edges] : by_post) {
    if (edges.size() <= 1) continue;
    SafetyReport::Violation v;
    v.query = g.vertices[key.first];
    v.post_idx = key.second;
    for (const auto* e : edges) v.targets.push_back({g.vertices[e->to], e->head_idx});
    report.violations.push_back(std::move(v));
  }
  return report;
}

namespace {

// Iterative Tarjan; components are emitted in reverse topological order of
// the condensation (a component closes only after everything it reaches).
struct Tarjan {
  explicit Tarjan(const CoordinationGraph& g)
      : n(static_cast<int>(g.vertices.size())), adj(n) {
    for (const auto& [u, v] : g.edges) adj[u].push_back(v);
    index.assign(n, -1);
    lowlink.assign(n, 0);
    on_stack.assign(n, false);
  }

  void run(std::vector<std::vector<int>>& components, std::vector<int>& comp_of) {
    comp_of.assign(n, -1);
    for (int v = 0; v < n; ++v) {
      if (index[v] == -1) visit(v, components, comp_of);
    }
  }

  void visit(int root, std::vector<std::vector<int>>& components,
             std::vector<int>& comp_of) {
    struct Frame {
      int v;
      std::size_t next_edge;
    };
    std::vector<Frame> frames{{root, 0}};
    while (!frames.empty()) {
      Frame& f = frames.back();
      int v = f.v;
      if (f.next_edge == 0) {
        index[v] = lowlink[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      bool descended = false;
      while (f.next_edge < adj[v].size()) {
        int w = adj[v][f.next_edge++];
        if (index[w] == -1) {
          frames.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
      }
      if (descended) continue;
      if (lowlink[v] == index[v]) {
        std::vector<int> comp;
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp_of[w] = static_cast<int>(components.size());
          comp.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
      }
      frames.pop_back();
      if (!frames.empty()) {
        int parent = frames.back().v;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }

  int n;
  std::vector<std::vector<int>> adj;
  std::vector<int> index, lowlink;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  int counter = 0;
};

}  // namespace

bool check_uniqueness(const CoordinationGraph& g) {
  if (g.vertices.empty()) return false;
  return condense(g).components.size() == 1;
}

ComponentsDAG condense(const CoordinationGraph& g) {
  ComponentsDAG dag;
  dag.vertex_names = g.vertices;
  Tarjan(g).run(dag.components, dag.component_of);
  for (const auto& [u, v] : g.edges) {
    int cu = dag.component_of[u], cv = dag.component_of[v];
    if (cu != cv) dag.edges.insert({cu, cv});
  }
  dag.order.resize(dag.components.size());
  for (std::size_t i = 0; i < dag.order.size(); ++i) dag.order[i] = static_cast<int>(i);
  return dag;
}

std::string to_dot(const ExtendedCoordinationGraph& g, const QuerySet& qs) {
  std::string out = "digraph extended_coordination {\n";
  for (const auto& v : g.vertices) out += "  \"" + v + "\";\n";
  for (const auto& e : g.edges) {
    out += "  \"" + g.vertices[e.from] + "\" -> \"" + g.vertices[e.to] +
           "\" [label=\"" + to_string(qs.queries[e.from].post[e.post_idx]) + " ~ " +
           to_string(qs.queries[e.to].heads[e.head_idx]) + "\"];\n";
  }
  out += "}\n";
  return out;
}

std::string to_dot(const CoordinationGraph& g) {
  std::string out = "digraph coordination {\n";
  for (const auto& v : g.vertices) out += "  \"" + v + "\";\n";
  for (const auto& [u, v] : g.edges) {
    out += "  \"" + g.vertices[u] + "\" -> \"" + g.vertices[v] + "\";\n";
  }
  out += "}\n";
  return out;
}

}  // namespace entq
