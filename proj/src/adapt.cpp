#include "probesched/adapt.hpp"

#include <algorithm>
#include <charconv>

#include "probesched/error.hpp"
#include "probesched/io.hpp"

namespace probesched {

PiEstimate::PiEstimate(std::uint64_t origin, std::size_t capacity) : origin_(origin), capacity_(capacity) {
  if (capacity_ == 0) throw ValidationError("estimate capacity must be positive");
}

PiEstimate PiEstimate::from_sample(const Sample& sample, std::uint64_t first_step, std::size_t capacity) {
  PiEstimate est(first_step, capacity);
  std::vector<Observation> observed;
  for (std::size_t t = 0; t < sample.length(); ++t) {
    observed.clear();
    for (const NodeSet& set : sample.steps[t]) observed.push_back({first_step + t, set});
    est.update(observed, first_step + t);
  }
  return est;
}

void PiEstimate::touch(const NodeSet& set, std::uint64_t born, std::size_t count) {
  auto [it, inserted] = records_.try_emplace(set, Entry{0, born, born});
  Entry& e = it->second;
  if (!inserted) {
    if (born > e.last_seen) {
      by_last_seen_.erase({e.last_seen, set});
      e.last_seen = born;
      by_last_seen_.insert({e.last_seen, set});
    }
    e.first_seen = std::min(e.first_seen, born);
  } else {
    by_last_seen_.insert({born, set});
  }
  e.count += count;
  while (records_.size() > capacity_) {
    const auto oldest = by_last_seen_.begin();
    records_.erase(oldest->second);
    by_last_seen_.erase(oldest);
    ++evictions_;
  }
}

void PiEstimate::update(std::span<const Observation> caught, std::uint64_t now) {
  if (now < origin_ || (clock_ && now < *clock_)) throw ValidationError("observation time went backwards");
  for (const Observation& obs : caught) {
    if (obs.born > now || obs.born < origin_) throw ValidationError("observed item born outside the clock range");
  }
  clock_ = now;
  for (const Observation& obs : caught) touch(obs.set, obs.born, 1);
}

PiRecord PiEstimate::snapshot(const Entry& e) const noexcept {
  const std::uint64_t steps = observed_steps();
  const double pi = steps == 0 ? 0.0 : std::min(1.0, static_cast<double>(e.count) / static_cast<double>(steps));
  return {e.count, e.first_seen, e.last_seen, pi};
}

std::optional<PiRecord> PiEstimate::find(const NodeSet& set) const {
  const auto it = records_.find(set);
  if (it == records_.end()) return std::nullopt;
  return snapshot(it->second);
}

std::vector<std::pair<NodeSet, PiRecord>> PiEstimate::records() const {
  std::vector<std::pair<NodeSet, PiRecord>> out;
  out.reserve(records_.size());
  for (const auto& [set, e] : records_) out.emplace_back(set, snapshot(e));
  return out;
}

void AdaptiveConfig::validate() const {
  if (!(staleness_factor >= 1.0)) throw ValidationError("staleness factor K must be at least 1");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in (0, 1]");
  if (r < 1) throw ValidationError("r must be at least 1");
  if (quorum < 1) throw ValidationError("quorum must be at least 1");
  if (capacity < 1) throw ValidationError("capacity must be positive");
}

std::vector<NodeSet> detect_change(const PiEstimate& est, std::uint64_t now, const AdaptiveConfig& cfg) {
  std::vector<NodeSet> stale;
  if (est.observed_steps() == 0) return stale;
  for (const auto& [set, rec] : est.records()) {
    if (static_cast<double>(rec.count) < cfg.min_count || rec.pi_hat <= 0.0) continue;
    if (now > rec.last_seen && static_cast<double>(now - rec.last_seen) > cfg.staleness_factor / rec.pi_hat) {
      stale.push_back(set);
    }
  }
  return stale;
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::perturb: return "perturb";
    case EventKind::drift: return "drift";
    case EventKind::resolve: return "resolve";
    case EventKind::evict: return "evict";
  }
  return "unknown";
}

std::string format_event(const Event& e) {
  return "step=" + std::to_string(e.step) + " event=" + std::string(to_string(e.kind)) + " detail=" + e.detail;
}

std::string format_event_log(std::span<const Event> events) {
  std::string out;
  for (const Event& e : events) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

std::vector<Event> parse_event_log(std::string_view text) {
  std::vector<Event> events;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty()) continue;
    if (!line.starts_with("step=")) throw ParseError(line_no, "expected 'step=<t> event=<kind> detail=<text>'");
    const std::size_t ev = line.find(" event=");
    const std::size_t det = line.find(" detail=");
    if (ev == std::string_view::npos || det == std::string_view::npos || det < ev) {
      throw ParseError(line_no, "expected 'step=<t> event=<kind> detail=<text>'");
    }
    Event e{};
    const std::string_view step = line.substr(5, ev - 5);
    const auto [ptr, ec] = std::from_chars(step.data(), step.data() + step.size(), e.step);
    if (ec != std::errc{} || ptr != step.data() + step.size()) throw ParseError(line_no, "bad step");
    const std::string_view kind = line.substr(ev + 7, det - ev - 7);
    bool known = false;
    for (EventKind k : {EventKind::perturb, EventKind::drift, EventKind::resolve, EventKind::evict}) {
      if (to_string(k) == kind) {
        e.kind = k;
        known = true;
      }
    }
    if (!known) throw ParseError(line_no, "unknown event kind '" + std::string(kind) + "'");
    e.detail = std::string(line.substr(det + 8));
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<PhaseSummary> phases_from_events(const LoadTrace& trace, std::span<const Event> events) {
  std::vector<std::size_t> bounds{0};
  for (const Event& e : events) {
    if (e.kind != EventKind::evict && e.step < trace.size()) bounds.push_back(static_cast<std::size_t>(e.step));
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  bounds.push_back(trace.size());

  std::vector<PhaseSummary> phases;
  bool sampling = false;
  for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
    for (const Event& e : events) {
      if (e.step != bounds[k]) continue;
      if (e.kind == EventKind::drift) sampling = true;
      if (e.kind == EventKind::resolve) sampling = false;
    }
    if (bounds[k] == bounds[k + 1]) continue;
    phases.push_back({bounds[k], bounds[k + 1], sampling, trace.average_load(bounds[k], bounds[k + 1])});
  }
  return phases;
}

AdaptiveResult adaptive_loop(ItemSource src, const Schedule& initial, const CostParams& params,
                             const AdaptiveConfig& cfg, const SolverConfig& solver_cfg, const AdaptivePlan& plan,
                             CounterRng& rng) {
  cfg.validate();
  const std::size_t n = source_nodes(src);
  if (initial.size() != n) throw DimensionError("initial schedule does not match the source's node count");
  if (plan.total_steps < 1) throw ValidationError("adaptive run needs at least one step");
  for (std::size_t t : plan.perturb_at)
    if (t >= plan.total_steps) throw ValidationError("perturbation step outside the run");
  for (std::size_t t : plan.sample_at)
    if (t >= plan.total_steps) throw ValidationError("sampling step outside the run");

  const std::size_t resample_length =
      cfg.resample_length != 0 ? cfg.resample_length
                               : required_sample_length({n, cfg.epsilon, params.theta(), cfg.r});

  CounterRng gen_rng = rng.fork(1);
  CounterRng probe_rng = rng.fork(2);
  CounterRng perm_rng = rng.fork(3);

  Schedule schedule = initial;
  ProbeDrawer drawer(schedule, params.c());
  Simulator sim(n, params.theta());
  PiEstimate est(0, cfg.capacity);
  std::size_t logged_evictions = 0;

  AdaptiveResult result{LoadTrace{}, {}, {}, initial};
  result.trace.steps.reserve(plan.total_steps);
  bool sampling = false;
  Sample pending;
  std::uint64_t sample_start = 0;
  const auto contains = [](const std::vector<std::size_t>& v, std::size_t t) {
    return std::find(v.begin(), v.end(), t) != v.end();
  };

  std::vector<LiveItem> caught;
  std::vector<Observation> observed;
  for (std::size_t t = 0; t < plan.total_steps; ++t) {
    if (contains(plan.perturb_at, t)) {
      src = relabeled(src, random_permutation(n, perm_rng));
      result.events.push_back({t, EventKind::perturb, "labels_permuted"});
    }
    if (!sampling && contains(plan.sample_at, t)) {
      sampling = true;
      pending.steps.clear();
      sample_start = t;
      result.events.push_back({t, EventKind::drift, "scheduled"});
    }

    std::vector<NodeSet> items = generate_items(src, t, gen_rng);
    if (sampling) {
      pending.steps.push_back(items);
      result.trace.push(sim.step(std::move(items), nullptr, probe_rng));
      if (pending.length() == resample_length) {
        std::string detail;
        try {
          SolveResult solved = wiggins_apx(pending, n, params, solver_cfg);
          schedule = solved.schedule;
          drawer = ProbeDrawer(schedule, params.c());
          detail = "converged:" + std::to_string(solved.converged ? 1 : 0) +
                   ",iterations:" + std::to_string(solved.iterations) +
                   ",sample_cost:" + format_double(solved.cost_trace.empty() ? solved.initial_cost
                                                                             : solved.cost_trace.back());
        } catch (const Error& e) {
          detail = "failed:";
          for (char ch : std::string_view(e.what())) detail += (ch == ' ' || ch == '\t') ? '_' : ch;
        }
        result.events.push_back({t + 1, EventKind::resolve, detail});
        est = PiEstimate::from_sample(pending, sample_start, cfg.capacity);
        logged_evictions = est.evictions();
        sampling = false;
      }
      continue;
    }

    caught.clear();
    result.trace.push(sim.step(std::move(items), &drawer, probe_rng, &caught));
    observed.clear();
    for (LiveItem& item : caught) observed.push_back({item.born, std::move(item.set)});
    est.update(observed, t);
    if (est.evictions() > logged_evictions) {
      result.events.push_back({t, EventKind::evict, "evicted:" + std::to_string(est.evictions() - logged_evictions)});
      logged_evictions = est.evictions();
    }
    if (plan.detect_drift && t + 1 < plan.total_steps) {
      const std::vector<NodeSet> stale = detect_change(est, t, cfg);
      if (stale.size() >= cfg.quorum) {
        sampling = true;
        pending.steps.clear();
        sample_start = t + 1;
        result.events.push_back({t + 1, EventKind::drift, "stale_sets:" + std::to_string(stale.size())});
      }
    }
  }
  result.phases = phases_from_events(result.trace, result.events);
  result.final_schedule = schedule;
  return result;
}

}  // namespace probesched
