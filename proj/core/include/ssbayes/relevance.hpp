#pragma once

#include <set>
#include <string>
#include <vector>

namespace ssbayes {

/// A declared model factorization: a DAG over data nodes (y*, x*, Y, X, X^m,
/// Y^m, X^r, Y^r) and parameter nodes (phi, theta, hyperparameters), plus the
/// observed set and the relevance query (candidate node vs. prediction
/// target).
///
/// Invariants checked by validate(): the graph is acyclic, the target is
/// never observed, and every parent of the target is either the conditioning
/// covariate x* or a parameter node.
class ModelSpecGraph {
 public:
  int add_node(const std::string& name, bool is_parameter = false);
  void add_edge(const std::string& parent, const std::string& child);
  void mark_observed(const std::string& name);
  void set_query(const std::string& candidate, const std::string& target);

  bool has_node(const std::string& name) const;
  int index(const std::string& name) const;  // throws InvalidQuery if unknown
  int n_nodes() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& parents(int i) const { return parents_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& children(int i) const { return children_[static_cast<std::size_t>(i)]; }
  bool is_observed(int i) const { return observed_.count(i) > 0; }
  bool is_parameter(int i) const { return parameters_.count(i) > 0; }
  const std::set<int>& observed() const { return observed_; }
  const std::string& candidate() const { return candidate_; }
  const std::string& target() const { return target_; }

  void validate() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::set<int> observed_;
  std::set<int> parameters_;
  std::string candidate_ = "X^m";
  std::string target_ = "y*";
};

/// Undirected graph produced by moralization.
struct UndirectedGraph {
  std::vector<std::string> names;
  std::vector<std::set<int>> adjacency;

  bool has_edge(const std::string& a, const std::string& b) const;
  int index(const std::string& name) const;
};

/// Marry the parents of every node, then drop edge directions.
UndirectedGraph moralize(const ModelSpecGraph& spec);

/// Which sampling designs contribute data.
struct DesignFlags {
  bool labeled_pairs = true;       // (Y, X) joint random sample
  bool unlabeled_x = false;        // X^m from the x-margin
  bool unlabeled_y = false;        // Y^m from the y-margin
  bool retrospective_pairs = false;  // (Y^r, X^r), y fixed by design
};

struct StandardSpecOptions {
  /// Collapse phi and theta into one shared parameter node, encoding models
  /// where the conditional and the margin share parameters structurally.
  bool merge_phi_theta = false;
  /// Treat the x-margin parameter as known (observed node).
  bool theta_known = false;
  /// Treat x* as chosen by design rather than drawn from p(x|theta):
  /// removes the theta -> x* edge. Either way x* is observed and always
  /// enters the conditioning set.
  bool x_star_by_design = false;
};

/// The canonical prediction DAG: theta drives the x-margins (X, X^m, x*),
/// phi drives the conditionals (Y given X, y* given x*), both drive Y^m and
/// X^r when present, and a shared hyperparameter couples phi and theta iff
/// prior_dependent.
ModelSpecGraph build_standard_spec(const DesignFlags& flags, bool prior_dependent,
                                   const StandardSpecOptions& options = {});

/// Bayes-ball reachability: true iff every trail between a and b is blocked
/// given the conditioning set. Throws InvalidQuery for unknown node names or
/// when a or b sits inside the conditioning set.
bool d_separated(const ModelSpecGraph& spec, const std::string& a,
                 const std::string& b, const std::set<std::string>& conditioning);

struct RelevanceVerdict {
  bool relevant = false;
  /// When relevant: one active trail from the candidate to the target,
  /// shortest first with deterministic tie-breaking.
  std::vector<std::string> witness_path;
  /// Human-readable summary; for irrelevant verdicts names a representative
  /// blocked trail and the node that blocks it.
  std::string explanation;
};

/// Is the candidate unlabeled-data node relevant to predicting the target?
/// Relevant iff the candidate and target are NOT d-separated given the
/// observed set plus x* (the candidate itself is excluded from its own
/// conditioning set).
RelevanceVerdict unlabeled_relevant(const ModelSpecGraph& spec);

/// Parse the line-oriented model-spec format:
///
///   # comment
///   nodes: y*, x*, Y, X, X^m, phi, theta
///   param: phi, theta
///   edges: theta->X, theta->X^m, phi->Y, X->Y, phi->y*, x*->y*
///   observed: Y, X, X^m, x*
///   query: X^m -> y*
///
/// `param:` is optional; names phi, theta, phi_theta and names starting with
/// "hyper" default to parameter nodes. Throws FormatError on malformed input.
ModelSpecGraph parse_model_spec(const std::string& text);

/// Named ready-made specs covering the standard modeling situations
/// (independent vs. coupled priors, shared parameters, known margins).
struct SpecCatalogEntry {
  std::string name;
  std::string description;
  ModelSpecGraph spec;
};
const std::vector<SpecCatalogEntry>& builtin_spec_catalog();

}  // namespace ssbayes
