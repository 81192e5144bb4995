#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "chamberline/gateway.hpp"

namespace chamberline {

namespace {

constexpr std::size_t kMaxLineBytes = 64 * 1024;
constexpr auto kLoopPeriod = std::chrono::milliseconds(10);

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

}  // namespace

struct GatewayServer::Client {
  int fd = -1;
  std::thread reader;
  std::atomic<bool> closed{false};
  bool greeted = false;
};

GatewayServer::GatewayServer(const SimConfig& config, std::uint16_t port, bool start_paused)
    : session_(config, start_paused) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error(fmt::format("socket: {}", std::strerror(errno)));
  const int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw std::runtime_error(fmt::format("cannot listen on port {}: {}", port, why));
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

GatewayServer::~GatewayServer() {
  stop();
  for (auto& c : clients_) {
    ::shutdown(c->fd, SHUT_RDWR);
    if (c->reader.joinable()) c->reader.join();
    ::close(c->fd);
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void GatewayServer::stop() {
  if (!stopping_.exchange(true) && listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
}

void GatewayServer::accept_loop() {
  while (!stopping_) {
    pollfd pfd{listen_fd_, POLLIN, 0};
    if (::poll(&pfd, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    auto client = std::make_shared<Client>();
    client->fd = fd;
    std::lock_guard lock(mutex_);
    clients_.push_back(client);
    // The run loop joins this thread before it drops the client.
    client->reader = std::thread([this, raw = client.get()] { read_loop(raw); });
  }
}

void GatewayServer::read_loop(Client* client) {
  const int fd = client->fd;
  std::string buffer;
  int line_no = 0;
  char chunk[4096];
  while (!stopping_) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::lock_guard lock(mutex_);
      inbox_.push_back({client, line_no, std::move(line)});
    }
    if (buffer.size() > kMaxLineBytes) {
      ++line_no;
      buffer.clear();
      std::lock_guard lock(mutex_);
      inbox_.push_back({client, line_no, std::string()});
    }
  }
  client->closed = true;
}

void GatewayServer::broadcast(const std::string& line) {
  std::lock_guard lock(mutex_);
  for (auto& c : clients_) {
    if (!c->closed && !send_all(c->fd, line)) c->closed = true;
  }
}

void GatewayServer::run() {
  std::thread acceptor([this] { accept_loop(); });

  using Clock = std::chrono::steady_clock;
  auto wall_base = Clock::now();
  std::uint64_t wall_consumed = 0;
  auto last_push = Clock::now();
  std::optional<Snapshot> last_sent;

  const auto push = [&](const Snapshot& snap) {
    broadcast(to_json(snap).dump() + "\n");
    last_sent = snap;
    last_push = Clock::now();
  };

  while (!stopping_) {
    std::this_thread::sleep_for(kLoopPeriod);

    std::vector<Inbound> batch;
    std::vector<std::shared_ptr<Client>> fresh;
    {
      std::lock_guard lock(mutex_);
      batch.swap(inbox_);
      for (auto& c : clients_) {
        if (!c->greeted) {
          c->greeted = true;
          fresh.push_back(c);
        }
      }
    }
    if (!fresh.empty()) {
      const std::string line = to_json(session_.snapshot()).dump() + "\n";
      for (auto& c : fresh) {
        if (!send_all(c->fd, line)) c->closed = true;
      }
    }

    for (auto& in : batch) {
      const auto command = in.text.empty()
                               ? Result<ClientCommand, std::string>(Err{std::string("line too long")})
                               : parse_client_command(in.text);
      if (!command) {
        const nlohmann::json err = {{"error", command.error()}, {"line", in.line}};
        if (!send_all(in.client->fd, err.dump() + "\n")) in.client->closed = true;
        continue;
      }
      const bool was_paused = session_.paused();
      session_.handle(*command);
      if (was_paused && !session_.paused()) {
        // Resuming must not replay the wall time spent paused.
        wall_base = Clock::now();
        wall_consumed = 0;
      }
      const Snapshot snap = session_.snapshot();
      if (!last_sent || !snap.same_state(*last_sent) || snap.t_ms != last_sent->t_ms) push(snap);
    }

    const auto wall_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - wall_base).count());
    if (session_.paused()) {
      wall_base = Clock::now();
      wall_consumed = 0;
    } else {
      session_.elapse(wall_ms - wall_consumed);
      wall_consumed = wall_ms;
    }

    const Snapshot snap = session_.snapshot();
    if (!last_sent || !snap.same_state(*last_sent) || Clock::now() - last_push >= kHeartbeat) {
      push(snap);
    }

    // Reap disconnected clients.
    std::vector<std::shared_ptr<Client>> dead;
    {
      std::lock_guard lock(mutex_);
      for (auto it = clients_.begin(); it != clients_.end();) {
        if ((*it)->closed) {
          dead.push_back(*it);
          it = clients_.erase(it);
        } else {
          ++it;
        }
      }
    }
    for (auto& c : dead) {
      ::shutdown(c->fd, SHUT_RDWR);
      if (c->reader.joinable()) c->reader.join();
      ::close(c->fd);
      std::lock_guard lock(mutex_);
      std::erase_if(inbox_, [gone = c.get()](const Inbound& in) { return in.client == gone; });
    }
  }

  acceptor.join();
}

}  // namespace chamberline
