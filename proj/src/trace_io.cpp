#include "fflab/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "fflab/scenario.hpp"

namespace fflab {

namespace {

void emit_ids(std::ostringstream& os, const std::vector<ValidatorId>& ids) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) os << ',';
    os << ids[i];
  }
}

void emit_checkpoint(std::ostringstream& os, const Checkpoint& c) {
  os << c.chain.tip << ',' << c.c << ',' << c.p;
}

void emit_message(std::ostringstream& os, const Message& m) {
  os << message_kind(m) << '|' << message_hash(m) << '|';
  std::visit(
      [&os](const auto& msg) {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, BlockMsg>) {
          os << msg.block.id << '|' << msg.block.parent << '|' << msg.block.slot;
        } else if constexpr (std::is_same_v<T, VoteMsg>) {
          os << msg.chain.tip << '|' << msg.slot << '|' << msg.sender << '|';
          if (msg.ffg) {
            emit_checkpoint(os, msg.ffg->source);
            os << "->";
            emit_checkpoint(os, msg.ffg->target);
          } else {
            os << '-';
          }
        } else if constexpr (std::is_same_v<T, ProposeTob>) {
          os << msg.chain_p.tip << '|' << msg.fast_chain.tip << '|' << msg.cert.size() << '|';
          if (msg.gj) {
            emit_checkpoint(os, *msg.gj);
          } else {
            os << '-';
          }
          os << '|' << msg.slot << '|' << msg.sender;
        } else if constexpr (std::is_same_v<T, ProposeRlmd>) {
          os << msg.chain_p.tip << '|' << msg.view_blocks.size() << '|' << msg.view_votes.size()
             << '|' << msg.slot << '|' << msg.sender;
        } else {
          static_assert(std::is_same_v<T, AckMsg>);
          emit_checkpoint(os, msg.checkpoint);
          os << '|' << msg.slot << '|' << msg.sender;
        }
      },
      m);
}

}  // namespace

std::string serialize_trace(const Trace& trace) {
  std::ostringstream os;
  os << "trace|v1\n";
  std::istringstream cfg(serialize_scenario(trace.config));
  std::string line;
  while (std::getline(cfg, line)) os << "config|" << line << '\n';

  for (std::size_t r = 0; r < trace.H.size(); ++r) {
    os << "H|" << r << '|';
    emit_ids(os, trace.H[r]);
    os << '\n';
    os << "A|" << r << '|';
    emit_ids(os, trace.A[r]);
    os << '\n';
    os << "W|" << r << '|';
    emit_ids(os, trace.W[r]);
    os << '\n';
  }
  for (std::size_t r = 0; r < trace.outputs.size(); ++r)
    for (std::size_t v = 0; v < trace.outputs[r].size(); ++v)
      os << "out|" << r << '|' << v << '|' << trace.outputs[r][v].available << '|'
         << trace.outputs[r][v].finalized << '\n';
  for (const auto& [slot, id] : trace.proposers) os << "proposer|" << slot << '|' << id << '\n';
  for (const auto& [round, tx] : trace.txs) os << "tx|" << round << '|' << tx << '\n';
  for (const SendRec& s : trace.sends) {
    os << "send|" << s.round << '|' << s.sender << '|' << (s.honest_at_send ? 1 : 0) << '|';
    emit_message(os, s.msg);
    os << '\n';
  }
  for (const RecvRec& rec : trace.recvs)
    os << "recv|" << rec.round << '|' << rec.to << '|' << rec.hash << '\n';
  return os.str();
}

std::string serialize_verdicts(const std::vector<Verdict>& verdicts) {
  std::ostringstream os;
  for (const Verdict& v : verdicts) {
    const char* st = v.status == Verdict::Status::pass   ? "pass"
                     : v.status == Verdict::Status::fail ? "fail"
                                                         : "skip";
    os << "verdict|" << v.name << '|' << st;
    if (!v.detail.empty()) os << '|' << v.detail;
    os << '\n';
  }
  return os.str();
}

std::string serialize_metrics(const LatencyReport& report) {
  std::ostringstream os;
  for (const auto& it : report.items) {
    os << "latency|" << it.tx << '|' << it.injected << '|';
    if (it.available_delay) os << *it.available_delay;
    else os << '-';
    os << '|';
    if (it.finalized_delay) os << *it.finalized_delay;
    else os << '-';
    os << '\n';
  }
  os << "median_available|";
  if (report.median_available) os << *report.median_available;
  else os << '-';
  os << '\n';
  os << "median_finalized|";
  if (report.median_finalized) os << *report.median_finalized;
  else os << '-';
  os << '\n';
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::parse_error, "cannot write file: " + path);
  out << content;
}

}  // namespace fflab
