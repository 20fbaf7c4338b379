#include "papm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "papm/errors.hpp"

namespace papm {

namespace {

// Work below this (nominal microseconds) is float residue from rate integration.
constexpr double kWorkEpsilon = 1e-9;

}  // namespace

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::JobCompletion:
            return "completion";
        case EventKind::ReferenceStep:
            return "reference";
        case EventKind::JobRelease:
            return "release";
        case EventKind::TraceSample:
            return "sample";
    }
    return "unknown";
}

void EventQueue::push(SimEvent ev) { heap_.push(ev); }

SimEvent EventQueue::pop() {
    SimEvent ev = heap_.top();
    heap_.pop();
    return ev;
}

std::optional<std::size_t> edf_select(std::span<const Job> ready) {
    if (ready.empty()) {
        return std::nullopt;
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < ready.size(); ++i) {
        const auto& a = ready[i];
        const auto& b = ready[best];
        if (std::tie(a.deadline, a.release, a.task) < std::tie(b.deadline, b.release, b.task)) {
            best = i;
        }
    }
    return best;
}

bool advance(Job& job, SimTime dt, double alpha) {
    if (dt < 0) {
        throw InternalError("negative execution interval");
    }
    if (!(alpha > 0.0)) {
        throw InternalError("non-positive CPU speed");
    }
    job.remaining -= static_cast<double>(dt) * alpha;
    return job.remaining <= kWorkEpsilon;
}

SimTime period_to_ticks(double period_us) {
    // Rounding up keeps sum(c/h) <= 1 in the tick domain.
    const double ticks = std::ceil(period_us - 1e-6);
    return std::max<SimTime>(1, static_cast<SimTime>(ticks));
}

Simulator::Simulator(const Scenario& scenario, SimOptions options)
    : scenario_(scenario), options_(options), specs_(scenario.task_specs()), rng_(scenario.seed) {
    if (options_.allow_overload) {
        auto errors = validate(scenario_);
        std::erase_if(errors, [](const std::string& e) { return e.starts_with("loops: infeasible"); });
        if (!errors.empty()) {
            std::string msg = "invalid scenario:";
            for (const auto& e : errors) msg += "\n  " + e;
            throw ConfigError(msg);
        }
    } else {
        require_valid(scenario_);
    }
    reference_.interval_us = scenario_.perturbation_interval_us;

    const double micro_step_s = static_cast<double>(scenario_.micro_step_us) * kTickSeconds;
    loops_.reserve(specs_.size());
    for (std::size_t i = 0; i < specs_.size(); ++i) {
        LoopRuntime lr;
        lr.spec = specs_[i];
        lr.plant = tf_to_state_space(scenario_.loops[i].plant, micro_step_s,
                                     "loop " + std::to_string(i + 1));
        lr.pid = PidController(scenario_.loops[i].gains);
        lr.c_current = lr.spec.c_nom;
        lr.base_period = lr.spec.h0;
        lr.window = scenario_.loops[i].h0_us;
        loops_.push_back(std::move(lr));
    }

    cpu_.levels = scenario_.cpu;
    cpu_.alpha = 1.0;
    cpu_.switch_overhead = scenario_.switch_overhead_us;
    result_.iae = IaeAccumulator(loops_.size());
}

SimResult Simulator::run() {
    const SimTime end = scenario_.duration_us;
    result_.duration = end;
    if (end == 0) {
        return std::move(result_);
    }

    result_.energy.set_speed(0, cpu_.alpha);
    for (std::size_t i = 0; i < loops_.size(); ++i) {
        schedule_release(static_cast<int>(i), 0);
    }
    queue_.push({0, EventKind::ReferenceStep, -1, queue_.next_seq()});
    queue_.push({0, EventKind::TraceSample, -1, queue_.next_seq()});

    while (now_ < end) {
        const SimTime next_event = queue_.empty() ? end : std::min(queue_.top().time, end);
        const auto done_at = completion_time();
        if (done_at && *done_at <= next_event && *done_at < end) {
            advance_world(*done_at);
            complete_job(*edf_select(ready_));
            continue;
        }
        advance_world(next_event);
        if (now_ >= end) {
            break;
        }
        handle(queue_.pop());
    }
    return std::move(result_);
}

double Simulator::pending_credit() const {
    return credit_time_ == now_ && cpu_.blocked_until <= now_ ? credit_ : 0.0;
}

std::optional<SimTime> Simulator::completion_time() const {
    const auto idx = edf_select(ready_);
    if (!idx) {
        return std::nullopt;
    }
    const SimTime start = std::max(now_, cpu_.blocked_until);
    const double work = ready_[*idx].remaining - (start == now_ ? pending_credit() : 0.0);
    if (work <= kWorkEpsilon) {
        return start;
    }
    const double ticks = work / cpu_.alpha;
    return start + static_cast<SimTime>(std::ceil(ticks - 1e-9 * std::max(1.0, ticks)));
}

void Simulator::advance_world(SimTime to) {
    if (to < now_) {
        throw InternalError("event order violated");
    }
    if (to == now_) {
        return;
    }
    const double credit = pending_credit();
    result_.energy.advance(now_, to);

    const SimTime exec_from = std::clamp(cpu_.blocked_until, now_, to);
    if (exec_from > now_) {
        record_segment(now_, exec_from, -2, -1);
    }
    if (exec_from < to) {
        if (const auto idx = edf_select(ready_)) {
            Job& job = ready_[*idx];
            if (!job.sampled) sample_for(job);
            job.remaining -= credit;
            advance(job, to - exec_from, cpu_.alpha);
            record_segment(exec_from, to, job.task, job.k);
        } else {
            record_segment(exec_from, to, -1, -1);
        }
    }
    credit_ = 0.0;
    credit_time_ = -1;

    integrate_plants(now_, to);
    now_ = to;
    check_deadlines();
}

void Simulator::integrate_plants(SimTime from, SimTime to) {
    // The reference only moves at ReferenceStep events, which split intervals.
    const double r = reference_.at(from);
    const SimTime grid = scenario_.micro_step_us;
    SimTime a = from;
    while (a < to) {
        const SimTime b = std::min(to, (a / grid + 1) * grid);
        const double dt = static_cast<double>(b - a) * kTickSeconds;
        for (std::size_t i = 0; i < loops_.size(); ++i) {
            auto& plant = loops_[i].plant;
            const double e0 = r - plant.sample();
            plant.integrate(dt);
            result_.iae.add(i, e0, r - plant.sample(), dt);
        }
        a = b;
    }
}

void Simulator::handle(const SimEvent& ev) {
    switch (ev.kind) {
        case EventKind::ReferenceStep:
            result_.events.push_back({now_, ev.kind, -1, cpu_.alpha});
            queue_.push({reference_.next_step_after(now_), EventKind::ReferenceStep, -1,
                         queue_.next_seq()});
            break;
        case EventKind::JobRelease:
            if (ev.seq == loops_[ev.task].release_seq) {
                release_job(ev.task);
            }
            break;
        case EventKind::TraceSample:
            record_trace();
            queue_.push(
                {now_ + scenario_.trace_cadence_us, EventKind::TraceSample, -1, queue_.next_seq()});
            break;
        case EventKind::JobCompletion:
            throw InternalError("completions are not queued");
    }
}

void Simulator::release_job(int task) {
    auto& loop = loops_[task];
    const double error = reference_.at(now_) - loop.plant.sample();

    double work = loop.spec.c_nom;
    if (scenario_.c_jitter) {
        std::uniform_real_distribution<double> jitter(scenario_.c_jitter->low,
                                                      scenario_.c_jitter->high);
        work *= jitter(rng_);
    }
    loop.c_current = work;

    std::vector<double> demand(loops_.size());
    std::vector<double> base(loops_.size());
    for (std::size_t j = 0; j < loops_.size(); ++j) {
        demand[j] = loops_[j].c_current;
        base[j] = loops_[j].base_period;
    }
    const PolicyDecision decision = decide(task, std::abs(error), demand, base);
    for (std::size_t j = 0; j < loops_.size(); ++j) {
        loops_[j].base_period = decision.base_periods[j];
    }
    const auto [alpha, window] =
        guarded_speed(task, work, decision.alpha, decision.effective_periods[task]);
    set_speed(alpha);

    loop.window = window;
    loop.last_release = now_;

    JobRecord rec;
    rec.task = task;
    rec.k = loop.k;
    rec.release = now_;
    rec.work = work;
    rec.deadline = now_ + window;
    rec.period = period_to_ticks(decision.effective_periods[task]);
    rec.alpha_at_release = alpha;
    result_.jobs.push_back(rec);

    Job job;
    job.task = task;
    job.k = loop.k;
    job.release = now_;
    job.deadline = now_ + window;
    job.remaining = work;
    job.h_s = static_cast<double>(window) * kTickSeconds;
    job.record = result_.jobs.size() - 1;
    if (scenario_.sampling == SamplingPoint::Release) {
        job.output = loop.pid.compute(error, job.h_s);
        job.sampled = true;
    }
    ready_.push_back(job);
    ++loop.k;

    schedule_release(task, now_ + window);
    result_.events.push_back({now_, EventKind::JobRelease, task, cpu_.alpha});

    double utilization = 0.0;
    for (const auto& l : loops_) {
        if (l.last_release >= 0) {
            utilization += l.c_current / (cpu_.alpha * static_cast<double>(l.window));
        }
    }
    if (!result_.utilization.empty() && result_.utilization.back().first == now_) {
        result_.utilization.back().second = utilization;
    } else {
        result_.utilization.emplace_back(now_, utilization);
    }
}

PolicyDecision Simulator::decide(int task, double error, std::span<const double> demand,
                                 std::span<const double> base) const {
    const PolicyInput in{specs_, demand, base, static_cast<std::size_t>(task), error};
    try {
        return policy_step(in, cpu_.levels, scenario_.mode);
    } catch (const SchedulabilityError&) {
        if (!options_.allow_overload) throw;
    }
    PolicyDecision d;
    d.base_periods.assign(base.begin(), base.end());
    if (scenario_.mode == PolicyMode::Qapm) {
        d.base_periods[task] = adapt_period(error, specs_[task]);
    } else {
        for (std::size_t j = 0; j < specs_.size(); ++j) d.base_periods[j] = specs_[j].h0;
    }
    d.alpha_ideal = ideal_speed(demand, d.base_periods);
    d.alpha = 1.0;
    d.u_expected = d.alpha_ideal;
    d.effective_periods = d.base_periods;
    return d;
}

// Windows already released keep their length, so a decision that lowers the
// speed can leave the live density sum(c / window) above alpha. The speed is
// then raised to the lowest level that covers it; the reclaimed periods stay.
// If even full speed does not cover it, the new job's window is widened.
std::pair<double, SimTime> Simulator::guarded_speed(int task, double work, double alpha,
                                                    double period) const {
    double others = 0.0;
    for (std::size_t j = 0; j < loops_.size(); ++j) {
        const auto& o = loops_[j];
        if (static_cast<int>(j) != task && o.last_release >= 0 && o.next_release > now_) {
            others += o.c_current / static_cast<double>(o.window);
        }
    }
    const SimTime window = period_to_ticks(period);
    const double need = others + work / static_cast<double>(window);
    const auto fits = [need](double a) { return need <= a * (1.0 + 1e-12); };

    if (fits(alpha)) {
        return {alpha, window};
    }
    if (cpu_.levels.ideal || scenario_.mode == PolicyMode::OsDvs) {
        if (fits(1.0)) {
            return {std::min(1.0, need * (1.0 + 1e-9)), window};
        }
    } else {
        for (double level : cpu_.levels.levels) {
            if (level > alpha && fits(level)) {
                return {level, window};
            }
        }
    }
    if (others >= 1.0) {
        return {1.0, window};
    }
    const auto widened = static_cast<SimTime>(std::ceil(work / (1.0 - others)));
    return {1.0, std::max(window, widened)};
}

void Simulator::schedule_release(int task, SimTime at) {
    auto& loop = loops_[task];
    loop.next_release = at;
    loop.release_seq = queue_.next_seq();
    queue_.push({at, EventKind::JobRelease, task, loop.release_seq});
}

void Simulator::complete_job(std::size_t ready_index) {
    if (!ready_[ready_index].sampled) sample_for(ready_[ready_index]);
    Job job = ready_[ready_index];
    ready_.erase(ready_.begin() + static_cast<std::ptrdiff_t>(ready_index));

    loops_[job.task].plant.actuate(job.output);
    result_.jobs[job.record].completion = now_;
    result_.events.push_back({now_, EventKind::JobCompletion, job.task, cpu_.alpha});

    // Completion happened somewhere inside the last tick; hand the rest of
    // that tick to whichever job runs next.
    credit_ = std::max(0.0, -job.remaining);
    credit_time_ = now_;
}

// Start-of-execution sampling: reads the plant at the dispatch decision.
void Simulator::sample_for(Job& job) {
    auto& loop = loops_[job.task];
    const double e = reference_.at(now_) - loop.plant.sample();
    job.output = loop.pid.compute(e, job.h_s);
    job.sampled = true;
}

void Simulator::check_deadlines() {
    for (auto& job : ready_) {
        if (!job.miss_flagged && job.deadline < now_) {
            job.miss_flagged = true;
            result_.jobs[job.record].missed = true;
            result_.misses.push_back({job.task, job.k, job.deadline, now_});
        }
    }
}

void Simulator::set_speed(double alpha) {
    if (alpha != cpu_.alpha && cpu_.switch_overhead > 0) {
        cpu_.blocked_until = now_ + cpu_.switch_overhead;
    }
    cpu_.alpha = alpha;
    result_.energy.set_speed(now_, alpha);
}

void Simulator::record_trace() {
    for (std::size_t i = 0; i < loops_.size(); ++i) {
        const auto& loop = loops_[i];
        TraceRow row;
        row.time = now_;
        row.loop = static_cast<int>(i) + 1;
        row.r = reference_.at(now_);
        row.y = loop.plant.sample();
        row.e = row.r - row.y;
        row.u = loop.plant.input();
        row.h_eff_ms = static_cast<double>(loop.window) / 1000.0;
        row.alpha = cpu_.alpha;
        row.energy = cpu_.alpha * cpu_.alpha;
        result_.trace.push_back(row);
    }
    result_.events.push_back({now_, EventKind::TraceSample, -1, cpu_.alpha});
}

void Simulator::record_segment(SimTime from, SimTime to, int task, std::int64_t k) {
    result_.schedule.push_back({from, to, task, k, cpu_.alpha});
}

}  // namespace papm
