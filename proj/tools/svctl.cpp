// svctl: operator CLI over a local data directory.
//
// Layout of the data directory ($SV_DATA_DIR or --data-dir):
//   identities/<name>.json      signing seed and PRE key pair (secret)
//   identities/<name>.pub.json  public half, what `share` needs
//   chain.bin                   simulated chain
//   gateway-<name>.json         per-owner gateway state (secret)
//   objects/                    storage node backend
//   node.json                   storage node id
//   access.log                  one JSON line per storage read decision

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "streamvault/common/error.hpp"
#include "streamvault/common/random.hpp"
#include "streamvault/crypto/hash.hpp"
#include "streamvault/gateway/gateway.hpp"
#include "streamvault/gateway/text_io.hpp"
#include "streamvault/harness/bench.hpp"
#include "streamvault/harness/synthetic.hpp"
#include "streamvault/ledger/ledger.hpp"
#include "streamvault/storage/backend.hpp"
#include "streamvault/storage/protocol.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sv;

namespace {

enum Exit { kOk = 0, kOther = 1, kUsage = 2, kPermission = 3, kIo = 4, kIntegrity = 5 };

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidArgument:
    case Errc::UnknownStream:
    case Errc::LateRecord:
    case Errc::BeforeStreamStart:
    case Errc::EpochOutOfRange:
    case Errc::NotCurrentlyGranted:
      return kUsage;
    case Errc::PermissionDenied:
    case Errc::NotStreamOwner:
    case Errc::StaleChallenge:
    case Errc::MissingKeyEpoch:
    case Errc::TokenMismatch:
      return kPermission;
    case Errc::StorageUnavailable:
    case Errc::LedgerUnavailable:
    case Errc::NotFound:
    case Errc::Malformed:
      return kIo;
    case Errc::BadTag:
    case Errc::BadSignature:
    case Errc::WrongEpochKey:
    case Errc::MalformedChunk:
    case Errc::CorruptCompressedData:
    case Errc::InvalidCiphertext:
      return kIntegrity;
    default:
      return kOther;
  }
}

struct Globals {
  std::string data_dir;
  std::string profile = "default";
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string format = "text";
  std::string invocation;  // argv, mixed into seeded randomness per command
};

struct Identity {
  std::string name;
  crypto::SigningKey signing;
  crypto::PreKeyPair pre;
};

/// Everything a command needs, loaded from and saved back to the data dir.
class Workspace {
 public:
  explicit Workspace(const Globals& g) : g_(g), root_(g.data_dir) {
    fs::create_directories(root_ / "identities");
    profile_ = harness::profile_by_name(g.profile);
    if (!g.config.empty()) profile_.apply_json(read_file(g.config));
    if (g.seed)
      rng_ = std::make_unique<DeterministicRandom>(
          crypto::sha256(as_bytes(std::to_string(*g.seed) + '\0' + g.invocation)));
    else
      rng_ = std::make_unique<SystemRandom>();
    const auto chain_path = root_ / "chain.bin";
    chain_ = fs::exists(chain_path) ? ledger::SimulatedChain::load(chain_path, profile_.chain)
                                    : std::make_unique<ledger::SimulatedChain>(profile_.chain);
    ledger_ = std::make_unique<ledger::Ledger>(*chain_);
    backend_ = std::make_unique<storage::FileBackend>(root_ / "objects");
    node_ = std::make_unique<storage::StorageNode>(storage::NodeConfig{node_id()}, *backend_, *ledger_);
  }

  static std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::StorageUnavailable, "cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static void write_file(const fs::path& path, const std::string& text) {
    const auto tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(Errc::StorageUnavailable, "cannot write " + tmp);
      out << text;
      if (!out) throw Error(Errc::StorageUnavailable, "cannot write " + tmp);
    }
    fs::rename(tmp, path);
  }

  Digest256 node_id() {
    const auto path = root_ / "node.json";
    if (fs::exists(path)) return fixed_from_hex<32>(json::parse(read_file(path)).at("node_id").get<std::string>());
    SystemRandom r;
    auto id = r.bytes<32>();
    write_file(path, json{{"node_id", to_hex(id)}}.dump(2) + "\n");
    return id;
  }

  Identity create_identity(const std::string& name) {
    const auto path = root_ / "identities" / (name + ".json");
    if (fs::exists(path)) throw Error(Errc::InvalidArgument, "identity '" + name + "' already exists");
    Identity id{name, crypto::SigningKey::generate(*rng_), crypto::pre_keygen(*rng_)};
    write_file(path, json{{"name", name},
                          {"signing_seed", to_hex(id.signing.seed())},
                          {"pre_secret", to_hex(id.pre.secret)},
                          {"pre_public", to_hex(id.pre.public_key)}}
                             .dump(2) + "\n");
    fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write);
    write_file(root_ / "identities" / (name + ".pub.json"),
               json{{"name", name},
                    {"id", to_hex(id.signing.id())},
                    {"signing_public", to_hex(id.signing.public_key())},
                    {"pre_public", to_hex(id.pre.public_key)}}
                       .dump(2) + "\n");
    return id;
  }

  Identity identity(const std::string& name) const {
    const auto path = root_ / "identities" / (name + ".json");
    if (!fs::exists(path)) throw Error(Errc::InvalidArgument, "no identity named '" + name + "'");
    auto j = json::parse(read_file(path));
    return {name, crypto::SigningKey::from_seed(fixed_from_hex<32>(j.at("signing_seed").get<std::string>())),
            {fixed_from_hex<32>(j.at("pre_secret").get<std::string>()),
             fixed_from_hex<32>(j.at("pre_public").get<std::string>())}};
  }

  crypto::ServiceKey service_key(const std::string& name) const {
    const auto path = root_ / "identities" / (name + ".pub.json");
    if (!fs::exists(path)) throw Error(Errc::InvalidArgument, "no public identity named '" + name + "'");
    auto j = json::parse(read_file(path));
    return {fixed_from_hex<32>(j.at("id").get<std::string>()), fixed_from_hex<32>(j.at("pre_public").get<std::string>())};
  }

  std::unique_ptr<gateway::Gateway> gateway_for(const Identity& owner) {
    auto gw = std::make_unique<gateway::Gateway>(owner.signing, *node_, *ledger_, *rng_);
    const auto path = gateway_path(owner);
    if (fs::exists(path)) gw->import_state(read_file(path));
    return gw;
  }

  void save_gateway(const Identity& owner, const gateway::Gateway& gw) {
    write_file(gateway_path(owner), gw.export_state() + "\n");
    fs::permissions(gateway_path(owner), fs::perms::owner_read | fs::perms::owner_write);
  }

  /// Mines enough blocks for everything pending to reach the confirmation
  /// depth, so each mutating command leaves a confirmed state behind.
  void confirm() {
    chain_->advance_time(profile_.chain.block_interval_ms);
    chain_->produce_block();
    for (std::uint32_t i = 1; i < chain_->confirmations(); ++i) chain_->produce_block();
    ledger_->sync();
  }

  void save_chain() { chain_->save(root_ / "chain.bin"); }

  void append_access_log() {
    std::ofstream out(root_ / "access.log", std::ios::app);
    for (const auto& d : node_->decisions())
      out << json{{"requester", to_hex(d.requester_id)},
                  {"stream", to_hex(d.stream_id)},
                  {"key", to_hex(d.key)},
                  {"decision", d.decision},
                  {"height", d.height},
                  {"error", d.error == Errc{} ? "" : errc_name(d.error)}}
                 .dump()
          << '\n';
    node_->clear_decisions();
  }

  ledger::Ledger& ledger() { return *ledger_; }
  ledger::SimulatedChain& chain() { return *chain_; }
  storage::StorageNode& node() { return *node_; }
  RandomSource& rng() { return *rng_; }
  const harness::Profile& profile() const { return profile_; }
  const Globals& globals() const { return g_; }

 private:
  fs::path gateway_path(const Identity& owner) const { return root_ / ("gateway-" + owner.name + ".json"); }

  Globals g_;
  fs::path root_;
  harness::Profile profile_;
  std::unique_ptr<RandomSource> rng_;
  std::unique_ptr<ledger::SimulatedChain> chain_;
  std::unique_ptr<ledger::Ledger> ledger_;
  std::unique_ptr<storage::FileBackend> backend_;
  std::unique_ptr<storage::StorageNode> node_;
};

Digest256 parse_stream(const std::string& hex) {
  try {
    return fixed_from_hex<32>(hex);
  } catch (const Error&) {
    throw Error(Errc::InvalidArgument, "stream id must be 64 hex characters");
  }
}

void print_report(const harness::BenchReport& report, const std::string& format) {
  std::cout << (format == "csv" ? report.csv() : report.text());
}

// Each command below maps onto one module operation.

int cmd_keygen(Workspace& ws, const std::string& name) {
  auto id = ws.create_identity(name);
  std::cout << "id " << to_hex(id.signing.id()) << "\npre_public " << to_hex(id.pre.public_key) << '\n';
  return kOk;
}

struct RegisterArgs {
  std::string owner;
  std::string label;
  std::int64_t t0 = 0;
  std::optional<std::int64_t> delta;
  std::optional<std::uint32_t> checkpoint_interval;
  std::size_t cache_capacity = 64;
  std::uint32_t lateness = 2;
  std::uint32_t rotate_every = 0;
};

int cmd_register(Workspace& ws, const RegisterArgs& a) {
  auto owner = ws.identity(a.owner);
  auto gw = ws.gateway_for(owner);
  gateway::StreamConfig config;
  config.label = a.label;
  config.t0 = a.t0;
  config.delta = a.delta.value_or(ws.profile().chunk_delta_ms);
  config.checkpoint_interval = a.checkpoint_interval.value_or(ws.profile().checkpoint_interval);
  config.cache_capacity = a.cache_capacity;
  config.lateness_windows = a.lateness;
  config.rotate_every_chunks = a.rotate_every;
  config.build.codec = ws.profile().codec;
  auto id = gw->register_stream(config);
  ws.confirm();
  gw->pump();
  ws.save_gateway(owner, *gw);
  ws.save_chain();
  std::cout << to_hex(id) << '\n';
  return kOk;
}

int cmd_ingest(Workspace& ws, const std::string& owner_name, const std::string& stream, const std::string& input,
               const std::string& fmt, bool flush) {
  auto owner = ws.identity(owner_name);
  auto gw = ws.gateway_for(owner);
  const auto id = parse_stream(stream);
  std::vector<stream::DataRecord> records;
  const auto format = gateway::parse_text_format(fmt);
  if (input == "-") {
    records = gateway::read_records(std::cin, format);
  } else {
    std::ifstream in(input);
    if (!in) throw Error(Errc::StorageUnavailable, "cannot read " + input);
    records = gateway::read_records(in, format);
  }
  for (auto& r : records) gw->ingest(id, std::move(r));
  if (flush) gw->flush(id);
  gw->pump();
  ws.confirm();
  gw->pump();
  ws.save_gateway(owner, *gw);
  ws.save_chain();
  std::cout << "ingested " << records.size() << " records; " << gw->sealed_indices(id).size()
            << " chunks sealed; " << gw->pending_pushes(id) << " pending\n";
  return kOk;
}

int cmd_share(Workspace& ws, const std::string& owner_name, const std::string& stream, const std::string& service,
              bool revoke) {
  auto owner = ws.identity(owner_name);
  auto gw = ws.gateway_for(owner);
  const auto id = parse_stream(stream);
  const auto key = ws.service_key(service);
  const auto tx = revoke ? gw->revoke(id, key.service_id) : gw->grant(id, key);
  ws.confirm();
  gw->pump();
  ws.save_gateway(owner, *gw);
  ws.save_chain();
  std::cout << (revoke ? "revoke " : "grant ") << to_hex(tx) << '\n';
  return kOk;
}

int cmd_get(Workspace& ws, const std::string& as, const std::string& stream, std::int64_t from, std::int64_t to,
            const std::string& fmt, const std::string& node_addr) {
  auto who = ws.identity(as);
  const auto id = parse_stream(stream);
  auto state = ws.ledger().snapshot();
  const auto* s = state->find(id);
  if (!s) throw Error(Errc::UnknownStream, "stream is not registered");
  const auto meta = gateway::meta_from_ledger(*state, id);

  std::optional<gateway::Reader> reader;
  if (who.signing.id() == s->owner_id) {
    auto gw = ws.gateway_for(who);
    reader.emplace(gw->owner_reader(id));
  } else {
    reader.emplace(gateway::Reader::for_service(who.signing, who.pre));
  }

  // Reads go through the wire protocol either way: in-process against the
  // local node, or over TCP to a running `node-run`.
  std::unique_ptr<storage::Transport> transport;
  int fd = -1;
  if (node_addr.empty()) {
    transport = std::make_unique<storage::InProcessTransport>(ws.node());
  } else {
    const auto colon = node_addr.rfind(':');
    const auto port = std::stoi(node_addr.substr(colon == std::string::npos ? 0 : colon + 1));
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (fd < 0 || ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
      throw Error(Errc::StorageUnavailable, "cannot connect to " + node_addr);
    transport = std::make_unique<storage::FdTransport>(fd, fd);
  }
  storage::RemoteStorage remote(*transport);
  std::vector<stream::DataRecord> records;
  try {
    records = reader->query(remote, meta, s->owner_key, from, to);
  } catch (...) {
    ws.append_access_log();
    if (fd >= 0) ::close(fd);
    throw;
  }
  ws.append_access_log();
  if (fd >= 0) ::close(fd);
  gateway::write_records(std::cout, records, gateway::parse_text_format(fmt));
  return kOk;
}

int cmd_audit(Workspace& ws, const std::string& stream) {
  auto state = ws.ledger().snapshot();
  const auto events = ledger::audit_log(*state, parse_stream(stream));
  if (ws.globals().format == "csv") {
    std::cout << "height,index,action,valid,tx,parties,detail\n";
    for (const auto& e : events) {
      std::string parties;
      for (const auto& p : e.parties) parties += (parties.empty() ? "" : ";") + to_hex(p);
      std::cout << e.height << ',' << e.index << ',' << e.action << ',' << (e.valid ? 1 : 0) << ','
                << to_hex(e.tx_digest) << ',' << parties << ',' << e.detail << '\n';
    }
  } else {
    for (const auto& e : events) std::cout << ledger::audit_event_json(e) << '\n';
  }
  return kOk;
}

int cmd_node_run(Workspace& ws, int port, bool once) {
  int server = ::socket(AF_INET, SOCK_STREAM, 0);
  if (server < 0) throw Error(Errc::StorageUnavailable, "socket failed");
  int yes = 1;
  ::setsockopt(server, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::bind(server, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(server, 16) != 0)
    throw Error(Errc::StorageUnavailable, "cannot listen on port " + std::to_string(port));
  std::cerr << "storage node listening on 127.0.0.1:" << port << '\n';
  for (;;) {
    int conn = ::accept(server, nullptr, nullptr);
    if (conn < 0) continue;
    if (once) {
      storage::serve_connection(ws.node(), conn);
      ::close(conn);
      break;
    }
    std::thread([&ws, conn] {
      try {
        storage::serve_connection(ws.node(), conn);
      } catch (const std::exception& e) {
        std::cerr << "connection: " << e.what() << '\n';
      }
      ::close(conn);
    }).detach();
  }
  ::close(server);
  ws.append_access_log();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svctl: auditable owner-controlled IoT stream storage"};
  app.require_subcommand(1);
  Globals g;
  if (const char* env = std::getenv("SV_DATA_DIR")) g.data_dir = env;
  if (g.data_dir.empty()) g.data_dir = "svdata";
  app.add_option("--data-dir", g.data_dir, "data directory (default $SV_DATA_DIR or ./svdata)");
  app.add_option("--profile", g.profile, "configuration profile")->check(CLI::IsMember(harness::profile_names()));
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "seed for every random choice");
  app.add_option("--config", g.config, "JSON file overriding profile fields")->check(CLI::ExistingFile);
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"csv", "text"}));

  std::string name;
  auto* keygen = app.add_subcommand("keygen", "create a signing and re-encryption identity");
  keygen->add_option("name", name)->required();

  RegisterArgs reg;
  auto* sreg = app.add_subcommand("stream-register", "register a stream on the ledger");
  sreg->add_option("--owner", reg.owner)->required();
  sreg->add_option("--label", reg.label)->required();
  sreg->add_option("--t0", reg.t0, "start of chunk 0, ms");
  sreg->add_option("--delta", reg.delta, "chunk window, ms");
  sreg->add_option("--checkpoint-interval", reg.checkpoint_interval);
  sreg->add_option("--cache-capacity", reg.cache_capacity);
  sreg->add_option("--lateness", reg.lateness, "lateness bound in windows");
  sreg->add_option("--rotate-every", reg.rotate_every, "advance the key epoch every n chunks");

  std::string owner, stream, input = "-", rec_format = "csv", service, node_addr;
  bool no_flush = false;
  auto* ingest = app.add_subcommand("ingest", "ingest records from CSV or NDJSON");
  ingest->add_option("--owner", owner)->required();
  ingest->add_option("--stream", stream)->required();
  ingest->add_option("--input", input, "file or - for stdin");
  ingest->add_option("--records", rec_format)->check(CLI::IsMember({"csv", "ndjson"}));
  ingest->add_flag("--no-flush", no_flush, "keep open windows open");

  auto* share = app.add_subcommand("share", "grant a service access");
  auto* revoke = app.add_subcommand("revoke", "revoke a service's access");
  for (auto* sub : {share, revoke}) {
    sub->add_option("--owner", owner)->required();
    sub->add_option("--stream", stream)->required();
    sub->add_option("--service", service)->required();
  }

  std::string as;
  std::int64_t from = 0, to = 0;
  auto* get = app.add_subcommand("get", "read a time range as some identity");
  get->add_option("--as", as)->required();
  get->add_option("--stream", stream)->required();
  get->add_option("--from", from)->required();
  get->add_option("--to", to)->required();
  get->add_option("--records", rec_format)->check(CLI::IsMember({"csv", "ndjson"}));
  get->add_option("--node", node_addr, "host:port of a running node (default: local)");

  auto* audit = app.add_subcommand("audit", "print a stream's ledger history");
  audit->add_option("--stream", stream)->required();

  int port = 7411;
  bool once = false;
  auto* node_run = app.add_subcommand("node-run", "serve the storage node protocol over TCP");
  node_run->add_option("--port", port);
  node_run->add_flag("--once", once, "exit after the first connection closes");

  harness::DhtSimOptions sim_opts;
  std::string trace_path;
  auto* sim = app.add_subcommand("sim", "run the DHT simulation");
  sim->add_option("--keys", sim_opts.keys);
  sim->add_option("--lookups", sim_opts.lookups);
  sim->add_option("--churn", sim_opts.churn_fraction)->check(CLI::Range(0.0, 0.99));
  sim->add_option("--trace", trace_path, "write the message trace as CSV");

  std::string experiment;
  double days = 7;
  auto* bench = app.add_subcommand("bench", "run an experiment and print its report");
  bench->add_option("experiment", experiment)->required()->check(CLI::IsMember({"compression", "overhead"}));
  bench->add_option("--days", days, "synthetic dataset length for compression");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  if (*seed_opt) g.seed = seed;
  for (int i = 1; i < argc; ++i) g.invocation += std::string(argv[i]) + '\0';

  try {
    if (*bench || *sim) {
      auto profile = harness::profile_by_name(g.profile);
      if (!g.config.empty()) profile.apply_json(Workspace::read_file(g.config));
      const auto s = g.seed.value_or(1);
      if (*sim) {
        std::string trace;
        print_report(harness::simulate_dht(profile, s, sim_opts, trace_path.empty() ? nullptr : &trace), g.format);
        if (!trace_path.empty()) Workspace::write_file(trace_path, trace);
      } else if (experiment == "compression") {
        harness::SyntheticParams p;
        p.count = static_cast<std::size_t>(days * 86'400);
        p.seed = s;
        auto data = harness::generate_synthetic(p);
        harness::CompressionOptions opts;
        opts.codec = profile.codec;
        print_report(harness::bench_compression(data, opts, s, profile.digest()), g.format);
      } else {
        print_report(harness::bench_access_overhead(profile, s, {}).report, g.format);
      }
      return kOk;
    }

    Workspace ws(g);
    if (*keygen) return cmd_keygen(ws, name);
    if (*sreg) return cmd_register(ws, reg);
    if (*ingest) return cmd_ingest(ws, owner, stream, input, rec_format, !no_flush);
    if (*share) return cmd_share(ws, owner, stream, service, false);
    if (*revoke) return cmd_share(ws, owner, stream, service, true);
    if (*get) return cmd_get(ws, as, stream, from, to, rec_format, node_addr);
    if (*audit) return cmd_audit(ws, stream);
    if (*node_run) return cmd_node_run(ws, port, once);
  } catch (const Error& e) {
    std::cerr << "svctl: " << errc_name(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "svctl: " << e.what() << '\n';
    return kIo;
  } catch (const json::exception& e) {
    std::cerr << "svctl: malformed data file: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "svctl: " << e.what() << '\n';
    return kOther;
  }
  return kUsage;
}
