// Copyright 2026 The gadgetsim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <unordered_set>
#include <vector>

#include "gadget/adversary.hpp"
#include "gadget/broadcast.hpp"
#include "gadget/config.hpp"
#include "gadget/freezing.hpp"
#include "gadget/internal.hpp"
#include "gadget/netsim.hpp"
#include "gadget/recovery.hpp"
#include "gadget/scripted_oracle.hpp"
#include "gadget/simple_sync.hpp"
#include "gadget/trace.hpp"

namespace gadget {

/// Deterministic round loop for one scenario.
///
/// Within a round: environment events (corruptions, kills, wakes, the
/// recover announcement), the adversary, network deliveries, validators by
/// index (inputs and messages, then the internal protocol step and witness
/// production), clients by index, and finally gadget timers (validators,
/// then clients).
class Simulator {
public:
    explicit Simulator(ScenarioConfig cfg)
        : cfg_(std::move(cfg)),
          keys_(cfg_.n, cfg_.seed),
          instance0_(0, Ledger{}, ValidatorSet::first_n(cfg_.n), 0),
          consumer_(keys_) {
        cfg_.validate();
        net_ = std::make_unique<net::Network>(cfg_.net_config(), &trace_);
        strategy_ = adv::make_strategy(cfg_.adversary, cfg_.seed);
        timeline_ = adv::Timeline{cfg_.n,     cfg_.clients.size(), cfg_.delta, cfg_.client_wait(), cfg_.r_maj,
                                  cfg_.r_rec, cfg_.u_bc(),         cfg_.v_new(), instance0_};
        if (cfg_.internal == InternalKind::scripted_oracle) {
            std::optional<Round> stall;
            if (cfg_.stall_after_maj) stall = cfg_.r_maj;
            oracles_[0] = std::make_shared<internal::OracleScript>(instance0_, cfg_.u_pi(), cfg_.delta, stall);
        }
        for (std::uint32_t v = 0; v < cfg_.n; ++v) {
            validators_.emplace_back(keys_.issue(v));
            Validator& node = validators_.back();
            node.id = PartyId::validator(v);
            node.pi = make_internal(node.key, instance0_);
            node.last_finalized = instance0_.genesis();
            if (recovery_gadget()) init_gadget(node, instance0_, cfg_.validator_wait(), {});
        }
        for (std::uint32_t c = 0; c < cfg_.clients.size(); ++c) {
            clients_.emplace_back();
            Client& node = clients_.back();
            node.id = PartyId::client(c);
            init_gadget(node, instance0_, cfg_.client_wait(), {});
            if (cfg_.r_rec) node.tally.emplace(keys_, cfg_.v_new());
        }
        for (const auto& t : cfg_.txs) tx_schedule_.emplace(t.round, t);
    }

    Trace run() {
        trace_.header = header();
        for (Round r = 0; r <= cfg_.horizon; ++r) round(r);
        return std::move(trace_);
    }

private:
    struct GadgetParty {
        PartyId id;
        InstanceId instance;
        std::unique_ptr<internal::VotePool> pool;
        std::unique_ptr<freezing::FreezeCore> core;
        std::uint64_t produced_version = ~std::uint64_t{0};
        bool halted = false;
        std::vector<Payload> buffered;
    };

    struct Validator : GadgetParty {
        explicit Validator(KeyHandle k) : key(std::move(k)) {}
        KeyHandle key;
        std::unique_ptr<internal::InternalValidator> pi;
        Ledger last_finalized;
        recovery::ValidatorPhase phase = recovery::ValidatorPhase::normal;
        std::optional<bcast::DsRelay> relay;
        std::vector<TxId> seen_txs;
        std::unordered_set<TxId> seen_set;
        bool corrupted = false;
        bool killed = false;
    };

    struct Client : GadgetParty {
        std::optional<recovery::GenesisTally> tally;
        bool recovered = false;
        bool restarted = false;
    };

    [[nodiscard]] bool recovery_gadget() const { return cfg_.gadget == GadgetKind::recovery; }

    TraceHeader header() const {
        TraceHeader h;
        h.name = cfg_.name;
        h.gadget = recovery_gadget() ? "recovery" : "freezing";
        h.internal = cfg_.internal == InternalKind::simple_sync ? "simple_sync" : "scripted_oracle";
        h.n = cfg_.n;
        h.n_clients = static_cast<std::uint32_t>(cfg_.clients.size());
        h.delta = cfg_.delta;
        h.horizon = cfg_.horizon;
        h.u_pi = cfg_.u_pi();
        h.validator_wait = recovery_gadget() ? cfg_.validator_wait() : 0;
        h.client_wait = cfg_.client_wait();
        h.r_maj = cfg_.r_maj;
        h.r_rec = cfg_.r_rec;
        h.u_bc = cfg_.u_bc();
        if (cfg_.r_rec) h.v_new = cfg_.v_new().members();
        h.seed = cfg_.seed;
        return h;
    }

    std::unique_ptr<internal::InternalValidator> make_internal(const KeyHandle& key, const InstanceId& inst) {
        if (cfg_.internal == InternalKind::simple_sync) {
            return std::make_unique<internal::SimpleSyncValidator>(keys_, key, inst, cfg_.delta);
        }
        auto& script = oracles_[inst.epoch_tag()];
        if (!script) script = std::make_shared<internal::OracleScript>(inst, cfg_.u_pi(), cfg_.delta, std::nullopt);
        return std::make_unique<internal::ScriptedOracleValidator>(key, script);
    }

    void init_gadget(GadgetParty& p, const InstanceId& inst, Round wait, Ledger confirmed) {
        p.instance = inst;
        p.pool = std::make_unique<internal::VotePool>(keys_, inst);
        p.core = std::make_unique<freezing::FreezeCore>(wait, std::move(confirmed));
        p.produced_version = ~std::uint64_t{0};
        p.halted = false;
    }

    void emit(Event e) { trace_.add(std::move(e)); }

    [[nodiscard]] bool validator_active(const Validator& v) const { return !v.corrupted && !v.killed; }

    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
    // Round loop
    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

    void round(Round r) {
        auto ev = net_->begin_round(r);
        for (std::uint32_t v : ev.corrupted) {
            validators_[v].corrupted = true;
            adversary_keys_.emplace(v, keys_.issue(v));
        }
        for (std::uint32_t v : ev.killed) validators_[v].killed = true;
        for (PartyId p : ev.recover_to) on_recover(p, r);

        adv::AdversaryView view{r, &timeline_, net_->take_fresh(), &adversary_keys_, net_.get()};
        adv::Controller ctl(*net_, keys_, r);
        strategy_->step(view, ctl);

        std::vector<std::vector<Payload>> inbox(net_->party_count());
        for (auto& d : net_->step(r)) inbox[net_->index_of(d.recipient)].push_back(std::move(d.payload));

        auto [tx_lo, tx_hi] = tx_schedule_.equal_range(r);
        for (auto& node : validators_) {
            if (!validator_active(node)) continue;
            for (auto it = tx_lo; it != tx_hi; ++it) {
                const TxSpec& t = it->second;
                bool to_me = t.to.empty() || std::find(t.to.begin(), t.to.end(), node.id.index) != t.to.end();
                if (to_me) input_tx(node, t, r);
            }
            for (const auto& m : inbox[net_->index_of(node.id)]) validator_message(node, m, r);
            if (cfg_.r_rec && node.phase == recovery::ValidatorPhase::broadcasting && r == *cfg_.r_rec + cfg_.u_bc()) {
                finish_recovery(node, r);
            }
        }
        for (auto& script : oracles_) {
            if (!script) continue;
            script->advance(r, [&](std::uint32_t v, Round) { return validator_active(validators_[v]); });
        }
        for (auto& node : validators_) {
            if (!validator_active(node)) continue;
            step_internal(node, r);
            if (recovery_gadget()) produce(node, r);
        }
        for (auto& node : clients_) {
            if (!net_->is_awake(node.id, r)) continue;
            for (const auto& m : inbox[net_->index_of(node.id)]) client_message(node, m, r);
            produce(node, r);
        }
        for (auto& node : validators_) {
            if (!validator_active(node) || !node.core || node.halted) continue;
            if (auto b = node.core->fire_timers(r)) {
                emit({.round = r, .kind = EventKind::bookmark, .party = node.id, .ledger = *b,
                      .instance = node.instance.epoch_tag()});
            }
        }
        for (auto& node : clients_) {
            if (!net_->is_awake(node.id, r) || node.halted) continue;
            if (auto c = node.core->fire_timers(r)) {
                emit({.round = r, .kind = EventKind::confirm, .party = node.id, .ledger = *c,
                      .instance = node.instance.epoch_tag()});
            }
        }
    }

    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
    // Validators
    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

    void record_tx(Validator& node, TxId id, Round r) {
        if (node.seen_set.insert(id).second) node.seen_txs.push_back(id);
        node.pi->on_tx(id, r);
    }

    void input_tx(Validator& node, const TxSpec& t, Round r) {
        emit({.round = r, .kind = EventKind::tx_input, .party = node.id, .tx = t.id});
        record_tx(node, t.id, r);
        net_->broadcast(node.id, make_payload(TxMsg{Transaction{t.id, {}, t.round}}), r);
    }

    void validator_message(Validator& node, const Payload& m, Round r) {
        switch (m->kind()) {
            case MessageKind::tx:
                record_tx(node, m->get<TxMsg>()->tx.id, r);
                break;
            case MessageKind::proposal:
            case MessageKind::block_vote:
                node.pi->on_message(*m, r);
                break;
            case MessageKind::finality_vote:
                if (recovery_gadget()) add_vote(node, *m->get<VoteRef>());
                break;
            case MessageKind::witness:
                if (recovery_gadget()) on_witness(node, *m->get<Witness>(), m->digest(), r, false);
                break;
            case MessageKind::ds_chain:
                if (node.relay) {
                    if (auto out = node.relay->on_chain(*m->get<SignatureChain>(), r)) {
                        net_->broadcast(node.id, make_payload(std::move(*out)), r);
                    }
                }
                break;
            case MessageKind::genesis_vote:
                break;
        }
    }

    void step_internal(Validator& node, Round r) {
        node.pi->step(r, [&](Payload p) {
            if (const auto* v = p->get<VoteRef>(); v && recovery_gadget()) add_vote(node, *v);
            net_->broadcast(node.id, std::move(p), r);
        });
        const Ledger& f = node.pi->finalized();
        if (f != node.last_finalized) {
            node.last_finalized = f;
            emit({.round = r, .kind = EventKind::finalize, .party = node.id, .ledger = f,
                  .instance = node.pi->instance().epoch_tag()});
        }
    }

    void start_broadcast(Validator& node, Round r) {
        ValidatorSet vn = cfg_.v_new();
        node.phase = recovery::ValidatorPhase::broadcasting;
        node.halted = true;
        node.core->discard_timers();
        const Ledger& ack = node.core->confirmed();
        emit({.round = r, .kind = EventKind::freeze, .party = node.id, .ledger = ack, .instance = node.instance.epoch_tag(),
              .detail = "recover"});
        node.relay.emplace(keys_, node.key, bcast::DsParams{r, cfg_.delta, vn, bcast::ds_context(r, vn)});
        auto chain = node.relay->start(ack);
        auto payload = make_payload(std::move(chain));
        emit({.round = r, .kind = EventKind::ds_broadcast, .party = node.id, .ledger = ack, .msg = payload->digest()});
        net_->broadcast(node.id, std::move(payload), r);
    }

    void finish_recovery(Validator& node, Round r) {
        ValidatorSet vn = cfg_.v_new();
        auto delivered = node.relay->deliver_all();
        for (const auto& [sender, value] : delivered) {
            Event e{.round = r, .kind = EventKind::ds_deliver, .party = node.id, .ledger = value,
                    .peer = PartyId::validator(sender)};
            if (!value) e.detail = "bottom";
            emit(std::move(e));
        }
        Ledger l_rec = recovery::compute_new_genesis(delivered, vn.size());
        emit({.round = r, .kind = EventKind::new_genesis, .party = node.id, .ledger = l_rec, .instance = 1});
        InstanceId inst = recovery::restart_instance(l_rec, vn, r);
        auto gv = make_payload(GenesisVote::make(node.key, inst));
        emit({.round = r, .kind = EventKind::genesis_vote, .party = node.id, .ledger = l_rec, .msg = gv->digest(),
              .instance = 1});
        net_->broadcast(node.id, std::move(gv), r);

        node.relay.reset();
        node.phase = recovery::ValidatorPhase::restarted;
        node.pi = make_internal(node.key, inst);
        node.last_finalized = l_rec;
        init_gadget(node, inst, cfg_.validator_wait(), l_rec);
        emit({.round = r, .kind = EventKind::restart, .party = node.id, .ledger = l_rec, .instance = 1});
        emit({.round = r, .kind = EventKind::bookmark, .party = node.id, .ledger = l_rec, .instance = 1,
              .detail = "genesis"});
        for (TxId t : recovery::carryover(node.seen_txs, l_rec)) node.pi->on_tx(t, r);
    }

    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
    // Clients
    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

    void client_message(Client& node, const Payload& m, Round r) {
        switch (m->kind()) {
            case MessageKind::finality_vote: {
                const VoteRef& v = *m->get<VoteRef>();
                if (awaiting_restart(node, v->instance)) {
                    node.buffered.push_back(m);
                } else if (!node.halted) {
                    add_vote(node, v);
                }
                break;
            }
            case MessageKind::witness: {
                const Witness& w = *m->get<Witness>();
                if (awaiting_restart(node, w.instance)) {
                    node.buffered.push_back(m);
                } else if (!node.halted) {
                    on_witness(node, w, m->digest(), r, false);
                }
                break;
            }
            case MessageKind::genesis_vote:
                if (node.tally && node.tally->add(*m->get<GenesisVote>())) maybe_restart(node, r);
                break;
            default:
                break;
        }
    }

    [[nodiscard]] bool awaiting_restart(const Client& node, const InstanceId& inst) const {
        return cfg_.r_rec && !node.restarted && inst.epoch_tag() == 1;
    }

    void maybe_restart(Client& node, Round r) {
        if (!node.recovered || node.restarted || !node.tally->decided()) return;
        const InstanceId& inst = *node.tally->decided();
        node.restarted = true;
        const Ledger& l_rec = inst.genesis();
        init_gadget(node, inst, cfg_.client_wait(), l_rec);
        emit({.round = r, .kind = EventKind::restart, .party = node.id, .ledger = l_rec, .instance = 1});
        emit({.round = r, .kind = EventKind::confirm, .party = node.id, .ledger = l_rec, .instance = 1,
              .detail = "genesis"});
        auto replay = std::move(node.buffered);
        node.buffered.clear();
        for (const auto& m : replay) client_message(node, m, r);
    }

    void on_recover(PartyId p, Round r) {
        if (p.is_validator()) {
            Validator& node = validators_[p.index];
            if (validator_active(node) && node.phase == recovery::ValidatorPhase::normal) start_broadcast(node, r);
            return;
        }
        Client& node = clients_[p.index];
        if (node.recovered) return;
        node.recovered = true;
        node.halted = true;
        node.core->discard_timers();
        emit({.round = r, .kind = EventKind::freeze, .party = node.id, .ledger = node.core->confirmed(),
              .instance = node.instance.epoch_tag(), .detail = "recover"});
        maybe_restart(node, r);
    }

    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~
    // Witness handling (shared by validators and clients)
    // ~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~~

    static void add_vote(GadgetParty& p, const VoteRef& v) {
        if (p.pool && v->instance == p.instance) p.pool->add(v);
    }

    void on_witness(GadgetParty& p, const Witness& w, Digest d, Round r, bool own) {
        if (p.halted || !p.core) return;
        if (w.instance.epoch_tag() < p.instance.epoch_tag()) {
            emit({.round = r, .kind = EventKind::witness_reject, .party = p.id, .msg = d, .instance = w.instance.epoch_tag(),
                  .detail = "stale_instance"});
            return;
        }
        auto res = consumer_.consume(p.instance, w, d);
        if (!res.ok()) {
            emit({.round = r, .kind = EventKind::witness_reject, .party = p.id, .msg = d, .instance = w.instance.epoch_tag(),
                  .detail = std::string(internal::to_string(res.error))});
            return;
        }
        emit({.round = r, .kind = EventKind::witness_accept, .party = p.id, .ledger = res.ledger, .msg = d,
              .instance = p.instance.epoch_tag(), .detail = own ? "own" : ""});
        if (!own) {
            for (const auto& v : w.votes) p.pool->add(v);
        }
        auto outcome = p.core->on_witness(res.ledger, r);
        if (outcome.first_conflict) {
            emit({.round = r, .kind = EventKind::freeze, .party = p.id, .ledger = res.ledger,
                  .instance = p.instance.epoch_tag(), .detail = "conflict"});
        }
    }

    /// Runs W over the party's vote pool and, when it yields a ledger the
    /// party has not seen yet, consumes and gossips the witness.
    void produce(GadgetParty& p, Round r) {
        if (p.halted || !p.pool) return;
        if (p.pool->version() == p.produced_version) return;
        p.produced_version = p.pool->version();
        auto best = p.pool->best_ledger();
        if (!best || p.core->seen().contains(*best)) return;
        auto w = p.pool->produce();
        auto payload = make_payload(std::move(*w));
        on_witness(p, *payload->get<Witness>(), payload->digest(), r, true);
        if (p.id.is_validator() || cfg_.client_gossip) net_->broadcast(p.id, std::move(payload), r);
    }

    ScenarioConfig cfg_;
    KeyRegistry keys_;
    InstanceId instance0_;
    internal::WitnessConsumer consumer_;
    Trace trace_;
    std::unique_ptr<net::Network> net_;
    std::unique_ptr<adv::Strategy> strategy_;
    adv::Timeline timeline_;
    std::map<std::uint32_t, KeyHandle> adversary_keys_;
    std::shared_ptr<internal::OracleScript> oracles_[2];
    std::vector<Validator> validators_;
    std::vector<Client> clients_;
    std::multimap<Round, TxSpec> tx_schedule_;
};

/// Validates and runs a scenario.
inline Trace run(const ScenarioConfig& cfg) {
    Simulator sim(cfg);
    return sim.run();
}

}  // namespace gadget
