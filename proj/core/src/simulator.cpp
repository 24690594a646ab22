#include "svsp/simulator.hpp"

#include <queue>

#include "svsp/sha256.hpp"

namespace svsp::net {

namespace {

enum class ItemKind : uint8_t { Start, Delivery, Timer };

struct Item {
  uint64_t due = 0;
  uint64_t order = 0;  // insertion index; total order with due
  ItemKind kind = ItemKind::Start;
  Direction dir = Direction::ClientToServer;  // Delivery
  Bytes datagram;                             // Delivery
  bool server_side = false;                   // Timer
  TimerKey key;                               // Timer
  uint64_t generation = 0;                    // Timer validity
};

struct ItemAfter {
  bool operator()(const Item& a, const Item& b) const {
    if (a.due != b.due) return a.due > b.due;
    return a.order > b.order;
  }
};

}  // namespace

void NetConditions::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(loss_prob) || !in_unit(reorder_prob) ||
      !in_unit(duplicate_prob)) {
    throw std::invalid_argument("net conditions: probabilities must lie in "
                                "[0, 1]");
  }
  if (delay_min_ms > delay_max_ms) {
    throw std::invalid_argument("net conditions: delay_min > delay_max");
  }
}

const char* direction_name(Direction d) {
  return d == Direction::ClientToServer ? "client_to_server"
                                        : "server_to_client";
}

const char* fate_name(Fate f) {
  switch (f) {
    case Fate::Delivered: return "delivered";
    case Fate::Dropped: return "dropped";
    case Fate::Duplicated: return "duplicated";
  }
  return "unknown";
}

SimResult sim_run(const SimParams& params) {
  params.net.validate();

  ContentResolver resolver = [&params](const std::string& name) {
    auto it = params.content.find(name);
    return it == params.content.end() ? nullptr : it->second;
  };
  ServerEngine server(resolver, params.server, params.server_seed);
  ClientEngine client(params.client, params.client_seed);
  SplitMix64 fate_rng(params.net.seed);

  std::priority_queue<Item, std::vector<Item>, ItemAfter> queue;
  uint64_t next_order = 0;
  std::map<TimerKey, uint64_t> server_gen;
  std::map<TimerKey, uint64_t> client_gen;

  SimResult result;
  uint64_t now = 0;

  // Fate draws per datagram, in pinned order: loss; then for survivors dup,
  // base delay, reorder (extra delay on hit), and the duplicate's own delay.
  // PROTOCOL.md documents this stream; changing it breaks recorded traces.
  auto post = [&](EngineOut&& out, bool from_server) {
    auto& gens = from_server ? server_gen : client_gen;
    for (auto& log : out.logs) {
      if (params.collect_logs) {
        result.logs.push_back("t=" + std::to_string(now) +
                              (from_server ? " server " : " client ") +
                              log.text);
      }
    }
    for (const TimerKey& key : out.cancel) ++gens[key];
    for (const ArmRequest& req : out.arm) {
      Item item;
      item.due = now + req.delay_ms;
      item.order = next_order++;
      item.kind = ItemKind::Timer;
      item.server_side = from_server;
      item.key = req.key;
      item.generation = ++gens[req.key];
      queue.push(std::move(item));
    }
    Direction dir = from_server ? Direction::ServerToClient
                                : Direction::ClientToServer;
    uint32_t delay_span = params.net.delay_max_ms - params.net.delay_min_ms + 1;
    for (Bytes& datagram : out.send) {
      if (fate_rng.unit() < params.net.loss_prob) {
        if (params.record_trace) {
          result.trace.push_back(SimEvent{now, dir, std::move(datagram),
                                          Fate::Dropped});
        }
        continue;
      }
      bool duplicated = fate_rng.unit() < params.net.duplicate_prob;
      uint64_t delay = params.net.delay_min_ms + fate_rng.below(delay_span);
      if (fate_rng.unit() < params.net.reorder_prob) {
        delay += 1 + fate_rng.below(25);
      }
      uint64_t dup_delay = 0;
      if (duplicated) {
        dup_delay = params.net.delay_min_ms + fate_rng.below(delay_span);
      }

      Item item;
      item.due = now + delay;
      item.order = next_order++;
      item.kind = ItemKind::Delivery;
      item.dir = dir;
      item.datagram = datagram;
      queue.push(std::move(item));
      if (params.record_trace) {
        result.trace.push_back(SimEvent{now, dir, datagram, Fate::Delivered});
      }
      if (duplicated) {
        Item copy;
        copy.due = now + dup_delay;
        copy.order = next_order++;
        copy.kind = ItemKind::Delivery;
        copy.dir = dir;
        copy.datagram = datagram;
        queue.push(std::move(copy));
        if (params.record_trace) {
          result.trace.push_back(
              SimEvent{now, dir, std::move(datagram), Fate::Duplicated});
        }
      }
    }
  };

  {
    Item start;
    start.due = 0;
    start.order = next_order++;
    start.kind = ItemKind::Start;
    queue.push(std::move(start));
  }

  while (!queue.empty()) {
    if (result.events_processed >= params.event_budget) {
      throw BudgetExceeded("simulator exceeded " +
                           std::to_string(params.event_budget) + " events");
    }
    ++result.events_processed;
    Item item = queue.top();
    queue.pop();
    now = item.due;
    result.virtual_ms = now;

    switch (item.kind) {
      case ItemKind::Start:
        post(client.start(now), false);
        break;
      case ItemKind::Delivery:
        if (item.dir == Direction::ClientToServer) {
          post(server.on_datagram(as_view(item.datagram), now), true);
        } else {
          post(client.on_datagram(as_view(item.datagram), now), false);
        }
        break;
      case ItemKind::Timer: {
        auto& gens = item.server_side ? server_gen : client_gen;
        auto it = gens.find(item.key);
        if (it == gens.end() || it->second != item.generation) break;
        if (item.server_side) {
          post(server.on_timer(item.key, now), true);
        } else {
          post(client.on_timer(item.key, now), false);
        }
        break;
      }
    }

    if (client.session().terminal() && server.all_terminal()) break;
  }

  result.client_phase = client.session().phase();
  result.client_abort = client.session().abort_info();
  result.client_stats = client.session().stats();
  result.client_content = client.session().content();
  result.client_tokens = client.session().tokens_sent();
  for (const auto& [sid, session] : server.sessions()) {
    result.server_sessions.push_back(SimServerSummary{
        sid, session.phase(), session.halt_reason(), session.stats()});
  }
  return result;
}

std::string trace_digest(const std::vector<SimEvent>& trace) {
  Sha256 h;
  Bytes row;
  for (const SimEvent& event : trace) {
    row.clear();
    put_u64(row, event.virtual_time_ms);
    row.push_back(static_cast<uint8_t>(event.direction));
    row.push_back(static_cast<uint8_t>(event.fate));
    put_u16(row, static_cast<uint16_t>(event.datagram.size()));
    h.update(row);
    h.update(as_view(event.datagram));
  }
  return to_hex(h.finish());
}

}  // namespace svsp::net
