#include "topo/broker.hpp"

#include "topo/expr.hpp"
#include "topo/grouphom.hpp"
#include "topo/simplicial.hpp"
#include "topo/wire.hpp"

#include <algorithm>

namespace topo {

namespace {

bool buildable(const SpaceExpr& s) {
  if (std::holds_alternative<SpaceExpr::EmSpace>(s.node())) return false;
  if (auto* p = std::get_if<SpaceExpr::Product>(&s.node()))
    return buildable(*p->lhs) && buildable(*p->rhs);
  return true;
}

}  // namespace

bool simplicial_accepts(const Question& q) {
  if (q.kind != QuestionKind::Homology || !is_space_term(q.subject)) return false;
  return buildable(space_from_term(q.subject));
}

bool grouphom_accepts(const Question& q) {
  if (q.kind != QuestionKind::Homology) return false;
  if (is_group_term(q.subject)) return true;
  if (!q.subject.is_apply_of("algtop1", "em_space") || !is_space_term(q.subject)) return false;
  const SpaceExpr s = space_from_term(q.subject);
  return std::get<SpaceExpr::EmSpace>(s.node()).level == 1;
}

bool hes_accepts(const Question& q) {
  return q.kind == QuestionKind::Homotopy && is_space_term(q.subject);
}

bool certifier_accepts(const Question& q) { return q.kind == QuestionKind::Certify; }

namespace {

class SimplicialKernel : public Kernel {
 public:
  std::string name() const override { return "simplicial"; }
  bool accepts(const Question& q) const override { return simplicial_accepts(q); }
  KernelResult solve(const Question& q, const SubAsk&) override {
    return {homology(space_from_term(q.subject), q.degree), std::nullopt};
  }
};

class GrouphomKernel : public Kernel {
 public:
  std::string name() const override { return "grouphom"; }
  bool accepts(const Question& q) const override { return grouphom_accepts(q); }
  KernelResult solve(const Question& q, const SubAsk&) override {
    if (is_group_term(q.subject))
      return {group_homology(group_from_term(q.subject), q.degree), std::nullopt};
    // H_n(K(G,1)) = H_n(G)
    const SpaceExpr s = space_from_term(q.subject);
    const auto& em = std::get<SpaceExpr::EmSpace>(s.node());
    return {group_homology(em.group, q.degree), std::nullopt};
  }
};

class HesKernel : public Kernel {
 public:
  explicit HesKernel(hes::RuleBase rules) : rules_(std::move(rules)) {}
  std::string name() const override { return "hes"; }
  bool accepts(const Question& q) const override { return hes_accepts(q); }
  KernelResult solve(const Question& q, const SubAsk& ask) override {
    hes::HomologyOracle oracle = [&ask](const Term& subject,
                                        int degree) -> std::optional<FgAbelianGroup> {
      Answer a;
      try {
        a = ask(Question{QuestionKind::Homology, subject, degree});
      } catch (const UnroutableError&) {
        return std::nullopt;
      }
      if (auto* g = std::get_if<FgAbelianGroup>(&a.value)) return *g;
      return std::nullopt;
    };
    hes::Inference inf =
        hes::infer(rules_, q.subject, q.degree, hes::structural_facts(q.subject), oracle);
    KernelResult r{Unknown{}, std::move(inf.trace)};
    if (inf.value) r.value = *inf.value;
    return r;
  }

 private:
  hes::RuleBase rules_;
};

class CertifierKernel : public Kernel {
 public:
  std::string name() const override { return "certifier"; }
  bool accepts(const Question& q) const override { return certifier_accepts(q); }
  KernelResult solve(const Question& q, const SubAsk&) override {
    return {check(table_from_term(q.subject)), std::nullopt};
  }
};

}  // namespace

std::shared_ptr<Kernel> make_simplicial_kernel() { return std::make_shared<SimplicialKernel>(); }
std::shared_ptr<Kernel> make_grouphom_kernel() { return std::make_shared<GrouphomKernel>(); }
std::shared_ptr<Kernel> make_hes_kernel(hes::RuleBase rules) {
  return std::make_shared<HesKernel>(std::move(rules));
}
std::shared_ptr<Kernel> make_certifier_kernel() { return std::make_shared<CertifierKernel>(); }

std::vector<std::string> servable_kernels() { return {"simplicial", "grouphom", "certifier"}; }

std::shared_ptr<Kernel> make_local_kernel(const std::string& name, const hes::RuleBase& rules) {
  if (name == "simplicial") return make_simplicial_kernel();
  if (name == "grouphom") return make_grouphom_kernel();
  if (name == "hes") return make_hes_kernel(rules);
  if (name == "certifier") return make_certifier_kernel();
  throw UserError("unknown kernel '" + name + "'");
}

std::function<Term(const Symbol&, const std::vector<Term>&)> kernel_handler(
    std::shared_ptr<Kernel> kernel) {
  return [kernel](const Symbol& proc, const std::vector<Term>& args) -> Term {
    Question q;
    const std::string name = proc.qualified();
    auto expect_args = [&](std::size_t n) {
      if (args.size() != n)
        throw UserError(name + " takes " + std::to_string(n) + " argument(s)");
    };
    if (name == "algtop1.homology" || name == "grp1.group_homology") {
      expect_args(2);
      q = question_from_term(apply("algtop1", "homology", args));
      if (name == "grp1.group_homology" && !is_group_term(q.subject))
        throw UserError("grp1.group_homology needs a group");
    } else if (name == "algtop1.homotopy_group") {
      expect_args(2);
      q = question_from_term(apply("algtop1", "homotopy_group", args));
    } else if (name == "cert1.certify") {
      expect_args(1);
      q = question_from_term(apply("cert1", "certify", args));
    } else {
      throw wire::UnknownProcedureError("unknown procedure " + name);
    }
    if (!kernel->accepts(q))
      throw UserError("kernel " + kernel->name() + " does not answer " + q.text());
    SubAsk no_subquestions = [](const Question& sq) -> Answer {
      throw ComputationError("sub-question " + sq.text() + " cannot be asked remotely");
    };
    return value_term(kernel->solve(q, no_subquestions).value);
  };
}

std::unique_ptr<Broker> make_default_broker(const hes::RuleBase& rules,
                                            const std::vector<RemoteSpec>& remotes) {
  auto broker = std::make_unique<Broker>();
  const std::vector<std::string> names{"simplicial", "grouphom", "hes", "certifier"};
  for (const auto& r : remotes) {
    if (std::find(names.begin(), names.end(), r.name) == names.end())
      throw UserError("unknown kernel '" + r.name + "' in --remote-kernel");
    const auto servable = servable_kernels();
    if (std::find(servable.begin(), servable.end(), r.name) == servable.end())
      throw UserError("kernel '" + r.name + "' cannot run remotely");
  }
  for (const auto& name : names) {
    auto remote = std::find_if(remotes.begin(), remotes.end(),
                               [&name](const RemoteSpec& r) { return r.name == name; });
    if (remote != remotes.end())
      broker->register_kernel(make_remote_kernel(name, remote->host, remote->port));
    else
      broker->register_kernel(make_local_kernel(name, rules));
  }
  return broker;
}

}  // namespace topo
