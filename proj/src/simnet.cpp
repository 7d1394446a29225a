#include "ddsim/simnet.hpp"

#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ddsim/protocol.hpp"
#include "ddsim/rng.hpp"

namespace ddsim {
namespace {

constexpr std::uint64_t kPatchDrawTag = 0x5041544348444957ull;

enum class EvKind : std::uint8_t {
    Tick = 0,
    Deliver,
    BuildDone,
    Compromise,
    PatchAvailable,
    FreshEmit,
    RevalTimer,
    RoundDeadline,
    ReportTimeout,
};

struct Ev {
    std::int64_t at = 0;
    std::uint64_t seq = 0;  // push order; ties on `at` resolve by push order
    EvKind kind = EvKind::Tick;
    std::uint32_t period = 0;
    std::uint64_t device = 0;
    std::uint64_t node = 0;
    bool revalidation = false;
    ProtocolMessage msg;
};

struct EvAfter {
    bool operator()(const Ev& a, const Ev& b) const {
        if (a.at != b.at)
            return a.at > b.at;
        return a.seq > b.seq;
    }
};

class Sim {
public:
    Sim(const ScenarioConfig& cfg, Mode mode, const AttackOverride& ov)
        : cfg_(cfg), mode_(mode), topo_(build_topology(cfg, ov)) {
        if (mode_ == Mode::Both)
            throw std::invalid_argument("run_scenario: pick one mode per run");

        out_.seed = cfg_.seed;
        out_.mode = mode_;
        out_.devices = cfg_.devices;
        out_.period_ms = cfg_.period_ms;
        out_.duration_ms = cfg_.duration_ms;

        cds_.role = Role::CDS;
        cds_.entity_id = topo_.cds;
        if (mode_ == Mode::Distributed) {
            for (std::size_t i = 0; i < topo_.hgws.size(); ++i) {
                RoleState& n = nodes_[topo_.lds_nodes[i]];
                n.role = Role::LDS;
                n.entity_id = topo_.lds_nodes[i];
                lds_of_[topo_.hgws[i]] = topo_.lds_nodes[i];
            }
            for (std::size_t i = 0; i < topo_.aps.size(); ++i) {
                RoleState& n = nodes_[topo_.sds_nodes[i]];
                n.role = Role::SDS;
                n.entity_id = topo_.sds_nodes[i];
                sds_of_[topo_.aps[i]] = topo_.sds_nodes[i];
            }
        }
        for (std::size_t i = 0; i < topo_.devices.size(); ++i)
            dev_ix_[topo_.devices[i].device_id] = i;
    }

    Transcript run() {
        // Setup handshake at t=0; registration traffic is not part of the
        // measured exchange.
        for (const DeviceState& dev : topo_.devices) {
            RoleState* local = nullptr;
            if (mode_ == Mode::Distributed && dev.base.route != RouteRegion::DirectCDS) {
                const std::uint64_t node = diagnosis_node_for(topo_, dev, mode_);
                local = &nodes_.at(node);
            }
            const RegistrationAck ack = register_device(cds_, local, dev.base, dev.stages, 0);
            if (!ack.accepted)
                throw std::logic_error("setup registration rejected: " + ack.reason);
            active_from_[dev.device_id] = 1;
        }

        const auto periods = static_cast<std::uint32_t>(cfg_.duration_ms / cfg_.period_ms);
        for (std::uint32_t k = 1; k <= periods; ++k) {
            Ev ev;
            ev.at = static_cast<std::int64_t>(k) * cfg_.period_ms;
            ev.kind = EvKind::Tick;
            ev.period = k;
            push(std::move(ev));
        }
        for (const auto& [id, tl] : topo_.attacks) {
            Ev c;
            c.at = tl.exploit_at;
            c.kind = EvKind::Compromise;
            c.device = id;
            push(std::move(c));
            Ev p;
            p.at = tl.patch_available_at;
            p.kind = EvKind::PatchAvailable;
            p.device = id;
            push(std::move(p));
        }

        // Drain to quiescence: in-flight chains complete past the last tick.
        while (!heap_.empty()) {
            Ev ev = heap_.top();
            heap_.pop();
            dispatch(ev);
        }
        return std::move(out_);
    }

private:
    DeviceState& device(std::uint64_t id) { return topo_.devices[dev_ix_.at(id)]; }

    std::uint32_t header_bytes(const DeviceState& dev) const {
        return dev.base.header_length_bits / 8;
    }

    static std::uint32_t epoch_of(const DeviceState& dev, std::uint32_t period) {
        const auto e = static_cast<std::int64_t>(period) - static_cast<std::int64_t>(dev.epoch_base);
        return e > 0 ? static_cast<std::uint32_t>(e) : 0u;
    }

    std::uint32_t period_floor(std::int64_t t) const {
        return static_cast<std::uint32_t>(t / cfg_.period_ms);
    }

    RouteEntities entities_for(const DeviceState& dev) const {
        RouteEntities e;
        e.route = dev.base.route;
        e.mode = mode_;
        e.cds = topo_.cds;
        e.device = dev.device_id;
        const std::uint64_t host = topo_.attachment.at(dev.device_id);
        if (dev.base.route == RouteRegion::ViaLDS) {
            e.hgw = host;
            if (mode_ == Mode::Distributed)
                e.lds = lds_of_.at(host);
        } else {
            e.ap = host;
            if (dev.base.route == RouteRegion::ViaSDS && mode_ == Mode::Distributed)
                e.sds = sds_of_.at(host);
        }
        return e;
    }

    ProtocolMessage make(MessageKind kind, std::uint64_t src, std::uint64_t dst,
                         const DeviceState& dev) const {
        ProtocolMessage m;
        m.kind = kind;
        m.src = src;
        m.dst = dst;
        m.device_id = dev.device_id;
        m.payload_bytes = body_size(cfg_.sizes, kind) + header_bytes(dev);
        return m;
    }

    void push(Ev ev) {
        ev.seq = next_seq_++;
        heap_.push(std::move(ev));
    }

    void record(TranscriptEvent e) { out_.events.push_back(std::move(e)); }

    // Records the wire exchange and, when the arrival has an effect,
    // schedules it after the path latency.
    void send(const ProtocolMessage& m, std::int64_t t, bool deliver, std::uint32_t period = 0,
              bool reval = false) {
        const HopPath path = resolve_path(topo_, cfg_.latency, m.src, m.dst);
        record(SendEvent{t, m.kind, m.src, m.dst, m.device_id, m.payload_bytes, path.hops});
        if (!deliver)
            return;
        Ev ev;
        ev.at = t + path.latency_ms;
        ev.kind = EvKind::Deliver;
        ev.period = period;
        ev.device = m.device_id;
        ev.revalidation = reval;
        ev.msg = m;
        push(std::move(ev));
    }

    void excuse(std::uint32_t period, std::uint64_t id) { decided_.insert({period, id}); }

    void dispatch(const Ev& ev) {
        switch (ev.kind) {
        case EvKind::Tick: on_tick(ev); break;
        case EvKind::Deliver: on_deliver(ev); break;
        case EvKind::BuildDone: on_build_done(ev); break;
        case EvKind::Compromise: on_compromise(ev); break;
        case EvKind::PatchAvailable: on_patch_available(ev); break;
        case EvKind::FreshEmit: on_fresh_emit(ev); break;
        case EvKind::RevalTimer: on_reval_timer(ev); break;
        case EvKind::RoundDeadline: on_round_deadline(ev); break;
        case EvKind::ReportTimeout: on_report_timeout(ev); break;
        }
    }

    void on_tick(const Ev& ev) {
        record(TickEvent{ev.at, ev.period});
        for (DeviceState& dev : topo_.devices) {
            const RegistryEntry& entry = cds_.registry.at(dev.device_id);

            if (entry.trust != Trust::Eliminated) {
                // Period announcement. Distributed routes are announced at
                // their diagnosis node; everything else end to end.
                std::uint64_t ps_dst = dev.device_id;
                if (mode_ == Mode::Distributed && dev.base.route != RouteRegion::DirectCDS)
                    ps_dst = diagnosis_node_for(topo_, dev, mode_);
                ProtocolMessage ps = make(MessageKind::PeriodStart, topo_.cds, ps_dst, dev);
                ps.epoch = ev.period;
                send(ps, ev.at, false);
            }

            if (!dev.eliminated) {
                const std::uint32_t epoch = epoch_of(dev, ev.period);
                ProtocolMessage cs = make(MessageKind::ContextShare, dev.device_id,
                                          diagnosis_node_for(topo_, dev, mode_), dev);
                cs.record = device_emit_context(dev, epoch, cfg_.seed);
                cs.epoch = epoch;
                send(cs, ev.at, true, ev.period);
            }

            if (entry.trust == Trust::Trusted && ev.period >= active_from_.at(dev.device_id)) {
                Ev to;
                to.at = ev.at + 2 * cfg_.period_ms;
                to.kind = EvKind::ReportTimeout;
                to.period = ev.period;
                to.device = dev.device_id;
                push(std::move(to));
            }
        }
    }

    void on_deliver(const Ev& ev) {
        switch (ev.msg.kind) {
        case MessageKind::ContextShare: on_context_share(ev); break;
        case MessageKind::DigestReport: {
            const ReportSource src = source_of_node(ev.msg.src);
            decide_now(ev.msg.device_id, ev.period, {Report{src, *ev.msg.graph}}, ev.at,
                       static_cast<std::int64_t>(ev.period) * cfg_.period_ms);
            break;
        }
        case MessageKind::PeriodStart:
        case MessageKind::Alarm:
            break;
        case MessageKind::PatchDispatch: on_patch_dispatch(ev); break;
        case MessageKind::TrustRevalidate: on_trust_revalidate(ev); break;
        case MessageKind::TrustAck:
            resolve_round(ev.msg.device_id, Report{source_of_node(ev.msg.src), *ev.msg.graph},
                          *ev.msg.record, ev.msg.epoch, ev.at);
            break;
        case MessageKind::ReRegister: on_reregister(ev); break;
        case MessageKind::Eliminate: {
            device(ev.msg.device_id).eliminated = true;
            auto node = nodes_.find(ev.msg.dst);
            if (node != nodes_.end())
                node->second.registry.erase(ev.msg.device_id);
            break;
        }
        }
    }

    void on_context_share(const Ev& ev) {
        if (!ev.revalidation) {
            const RegistryEntry& entry = cds_.registry.at(ev.msg.device_id);
            if (entry.trust != Trust::Trusted || ev.period < active_from_.at(ev.msg.device_id)) {
                excuse(ev.period, ev.msg.device_id);
                return;
            }
        }
        // Graph builds serialize on the receiving CPU; everything else in
        // the pipeline is treated as free.
        const std::int64_t start = std::max(busy_until_[ev.msg.dst], ev.at);
        const std::int64_t finish = start + cfg_.latency.graph_build_ms;
        busy_until_[ev.msg.dst] = finish;
        Ev done;
        done.at = finish;
        done.kind = EvKind::BuildDone;
        done.period = ev.period;
        done.device = ev.msg.device_id;
        done.node = ev.msg.dst;
        done.revalidation = ev.revalidation;
        done.msg = ev.msg;
        push(std::move(done));
    }

    void on_build_done(const Ev& ev) {
        const DeviceState& dev = device(ev.device);
        const ContextRecord& rec = *ev.msg.record;

        if (ev.node == topo_.cds) {
            const Report rep{ReportSource::Device, build_graph(rec, dev.stages)};
            if (ev.revalidation)
                resolve_round(ev.device, rep, rec, ev.msg.epoch, ev.at);
            else
                decide_now(ev.device, ev.period, {rep}, ev.at,
                           static_cast<std::int64_t>(ev.period) * cfg_.period_ms);
            return;
        }

        const RoleState& node = nodes_.at(ev.node);
        const LocalDiagnosis ld = local_diagnose(node, rec, dev.stages);
        if (!ld.known_device || !ld.graph)
            return;  // unknown here; the fleet decision surfaces the gap as a missing report

        ProtocolMessage up = make(ev.revalidation ? MessageKind::TrustAck : MessageKind::DigestReport,
                                  ev.node, topo_.cds, dev);
        up.graph = ld.graph;
        up.epoch = ev.msg.epoch;
        if (ev.revalidation)
            up.record = rec;
        send(up, ev.at, true, ev.period, ev.revalidation);
    }

    void on_compromise(const Ev& ev) {
        DeviceState& dev = device(ev.device);
        if (dev.eliminated)
            return;
        dev.compromised = true;
        dev.compromise_epoch = epoch_of(dev, period_floor(ev.at));
        if (auto it = topo_.tamper_plan.find(dev.device_id); it != topo_.tamper_plan.end())
            dev.tamper_profile = it->second;
        std::uint32_t mask = 0;
        if (dev.tamper_profile)
            for (ContextField f : *dev.tamper_profile)
                mask |= 1u << static_cast<unsigned>(f);
        record(CompromiseEvent{ev.at, ev.device, mask});
    }

    void on_patch_available(const Ev& ev) { record(PatchAvailableEvent{ev.at, ev.device}); }

    void on_patch_dispatch(const Ev& ev) {
        DeviceState& dev = device(ev.msg.device_id);
        auto it = topo_.attacks.find(dev.device_id);
        if (it == topo_.attacks.end() || dev.malicious || !dev.compromised)
            return;
        if (it->second.patch_available_at > ev.at)
            return;  // nothing to install yet
        const double u = static_cast<double>(derive(cfg_.seed, {kPatchDrawTag, dev.device_id}) >> 11) *
                         0x1.0p-53;
        if (u >= cfg_.patch_efficacy)
            return;  // installation failed; revalidation will see the intact compromise
        dev.compromised = false;
        dev.tamper_profile.reset();
        dev.firmware.version += 1;
        it->second.patch_applied_at = ev.at;
    }

    void on_trust_revalidate(const Ev& ev) {
        if (ev.msg.dst == ev.msg.device_id) {
            fresh_emit(ev.msg.device_id, ev.at);
            return;
        }
        // Local node polls its device; the poll rides the access link.
        Ev fe;
        fe.at = ev.at + cfg_.latency.device_gw_ms;
        fe.kind = EvKind::FreshEmit;
        fe.device = ev.msg.device_id;
        push(std::move(fe));
    }

    void on_fresh_emit(const Ev& ev) { fresh_emit(ev.device, ev.at); }

    void fresh_emit(std::uint64_t id, std::int64_t t) {
        DeviceState& dev = device(id);
        if (dev.eliminated)
            return;
        const std::uint32_t epoch = epoch_of(dev, period_floor(t));
        ProtocolMessage cs =
            make(MessageKind::ContextShare, id, diagnosis_node_for(topo_, dev, mode_), dev);
        cs.record = device_emit_context(dev, epoch, cfg_.seed);
        cs.epoch = epoch;
        send(cs, t, true, 0, true);
    }

    void on_reval_timer(const Ev& ev) {
        auto it = rounds_.find(ev.device);
        if (it == rounds_.end() || it->second.resolved)
            return;
        const DeviceState& dev = device(ev.device);
        const ProtocolMessage msg =
            revalidate_trust(it->second, entities_for(dev), cfg_.sizes, header_bytes(dev));
        record(RoundEvent{ev.at, ev.device, RoundPhase::Revalidating});
        send(msg, ev.at, true);
    }

    void on_round_deadline(const Ev& ev) {
        auto it = rounds_.find(ev.device);
        if (it == rounds_.end() || it->second.resolved)
            return;
        ProtocolRound& round = it->second;
        const DeviceState& dev = device(ev.device);
        const RouteEntities ents = entities_for(dev);
        // Force the phase walk so an entirely silent chain still terminates.
        if (round.phase == RoundPhase::Alarmed)
            (void)dispatch_patch(round, ents, cfg_.sizes, header_bytes(dev));
        if (round.phase == RoundPhase::Patching)
            (void)revalidate_trust(round, ents, cfg_.sizes, header_bytes(dev));
        const ResolveOutcome out =
            resolve(cds_, round, ents, {}, dev.base, cfg_.seed, 0,
                    required_sources_for(mode_, dev.base.route), cfg_.sizes, header_bytes(dev));
        finish_resolve(ev.device, out, ev.at);
    }

    void on_report_timeout(const Ev& ev) {
        if (decided_.count({ev.period, ev.device}))
            return;
        const RegistryEntry& entry = cds_.registry.at(ev.device);
        if (entry.trust != Trust::Trusted || ev.period < active_from_.at(ev.device)) {
            excuse(ev.period, ev.device);
            return;
        }
        decide_now(ev.device, ev.period, {}, ev.at,
                   static_cast<std::int64_t>(ev.period) * cfg_.period_ms);
    }

    ReportSource source_of_node(std::uint64_t node) const {
        auto it = nodes_.find(node);
        if (it == nodes_.end())
            throw std::logic_error("report from an entity that runs no diagnosis");
        return it->second.role == Role::LDS ? ReportSource::LDS : ReportSource::SDS;
    }

    void decide_now(std::uint64_t id, std::uint32_t period, const std::vector<Report>& reports,
                    std::int64_t t, std::int64_t tick_t) {
        if (decided_.count({period, id}))
            return;
        const DeviceState& dev = device(id);
        const Decision d = cds_decide(cds_, cfg_.seed, id, reports, epoch_of(dev, period),
                                      required_sources_for(mode_, dev.base.route));
        decided_.insert({period, id});
        if (!d.decided)
            return;  // trust moved while the report was in flight
        record(DecideEvent{t, id, period, d.verdict, tick_t});
        if (d.verdict.kind == VerdictKind::Threat)
            open_round(id, d.verdict, t);
    }

    void open_round(std::uint64_t id, const Verdict& v, std::int64_t t) {
        DeviceState& dev = device(id);
        RegistryEntry& entry = cds_.registry.at(id);
        const RouteEntities ents = entities_for(dev);
        ProtocolRound& round = rounds_[id];

        const auto alarms =
            raise_alarm(entry, round, ents, v, t, cfg_.period_ms, cfg_.sizes, header_bytes(dev));
        record(TrustEvent{t, id, Trust::Suspect});
        record(RoundEvent{t, id, RoundPhase::Alarmed});
        for (const ProtocolMessage& m : alarms)
            send(m, t, false);

        const ProtocolMessage patch = dispatch_patch(round, ents, cfg_.sizes, header_bytes(dev));
        record(RoundEvent{t, id, RoundPhase::Patching});
        send(patch, t, true);

        Ev reval;
        reval.at = t + cfg_.period_ms;
        reval.kind = EvKind::RevalTimer;
        reval.device = id;
        push(std::move(reval));

        Ev deadline;
        deadline.at = round.deadline;
        deadline.kind = EvKind::RoundDeadline;
        deadline.device = id;
        push(std::move(deadline));
    }

    void resolve_round(std::uint64_t id, const Report& rep, const ContextRecord& fresh,
                       std::uint32_t reval_epoch, std::int64_t t) {
        auto it = rounds_.find(id);
        if (it == rounds_.end() || it->second.resolved)
            return;
        const DeviceState& dev = device(id);
        const ResolveOutcome out =
            resolve(cds_, it->second, entities_for(dev), {rep}, fresh, cfg_.seed, reval_epoch,
                    required_sources_for(mode_, dev.base.route), cfg_.sizes, header_bytes(dev));
        finish_resolve(id, out, t);
    }

    void finish_resolve(std::uint64_t id, const ResolveOutcome& out, std::int64_t t) {
        record(RoundEvent{t, id, out.phase});
        if (out.phase == RoundPhase::ResolvedReRegistered) {
            record(TrustEvent{t, id, Trust::Trusted});
            // Periodic diagnosis resumes at the first tick after the device
            // has adopted its new registration.
            const HopPath down = resolve_path(topo_, cfg_.latency, topo_.cds, id);
            active_from_[id] = period_floor(t + down.latency_ms) + 1;
        } else {
            record(TrustEvent{t, id, Trust::Eliminated});
        }
        for (const ProtocolMessage& m : out.messages)
            send(m, t, true);
    }

    void on_reregister(const Ev& ev) {
        // The firmware bump already happened when the patch landed; the new
        // registration only restarts the counter lineage.
        DeviceState& dev = device(ev.msg.device_id);
        dev.generation += 1;
        dev.epoch_base = period_floor(ev.at);
        dev.compromised = false;
        dev.tamper_profile.reset();
    }

    ScenarioConfig cfg_;
    Mode mode_;
    Topology topo_;
    RoleState cds_;
    std::map<std::uint64_t, RoleState> nodes_;       // LDS/SDS, distributed mode only
    std::map<std::uint64_t, std::uint64_t> lds_of_;  // HGW -> resident LDS
    std::map<std::uint64_t, std::uint64_t> sds_of_;  // AP -> resident SDS
    std::map<std::uint64_t, std::size_t> dev_ix_;
    std::map<std::uint64_t, std::int64_t> busy_until_;
    std::map<std::uint64_t, ProtocolRound> rounds_;
    std::map<std::uint64_t, std::uint32_t> active_from_;
    std::set<std::pair<std::uint32_t, std::uint64_t>> decided_;
    std::priority_queue<Ev, std::vector<Ev>, EvAfter> heap_;
    std::uint64_t next_seq_ = 0;
    Transcript out_;
};

} // namespace

std::set<ReportSource> required_sources_for(Mode mode, RouteRegion route) {
    if (mode == Mode::Distributed) {
        if (route == RouteRegion::ViaLDS)
            return {ReportSource::LDS};
        if (route == RouteRegion::ViaSDS)
            return {ReportSource::SDS};
    }
    return {ReportSource::Device};
}

Transcript run_scenario(const ScenarioConfig& config, Mode mode) {
    return run_scenario(config, mode, AttackOverride{});
}

Transcript run_scenario(const ScenarioConfig& config, Mode mode, const AttackOverride& ov) {
    Sim sim(config, mode, ov);
    return sim.run();
}

} // namespace ddsim
