/*
 * Copyright 2026 The cbrn_sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cbrn/service/state_server.hpp"

#include <atomic>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

#include "cbrn/common/errors.hpp"
#include "cbrn/mission/protocol.hpp"

namespace cbrn::service
{

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace
{

class Session : public std::enable_shared_from_this<Session>
{
public:
  Session(tcp::socket socket, StateServer::EventSink & sink)
  : ws_(std::move(socket)), sink_(sink) {}

  void run(std::shared_ptr<const std::string> latest)
  {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(
      [self = shared_from_this(), latest](beast::error_code ec) {
        if (ec) {
          return;
        }
        self->open_ = true;
        const nlohmann::json hello{{"type", "hello"}, {"version", mission::kProtocolVersion}};
        self->send(std::make_shared<const std::string>(hello.dump()));
        if (latest) {
          self->send(latest);
        }
        self->read();
      });
  }

  /// Io thread only.
  void send(std::shared_ptr<const std::string> msg)
  {
    if (!open_) {
      return;
    }
    if (writing_) {
      pending_ = std::move(msg);  // drop older unsent frames
      return;
    }
    write(std::move(msg));
  }

  bool open() const {return open_;}

  /// Drops the connection without a closing handshake.
  void shutdown()
  {
    open_ = false;
    beast::error_code ec;
    beast::get_lowest_layer(ws_).socket().shutdown(tcp::socket::shutdown_both, ec);
    beast::get_lowest_layer(ws_).socket().close(ec);
  }

private:
  void write(std::shared_ptr<const std::string> msg)
  {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(
      asio::buffer(*msg),
      [self = shared_from_this(), msg](beast::error_code ec, std::size_t) {
        self->writing_ = false;
        if (ec) {
          self->open_ = false;
          return;
        }
        if (self->pending_) {
          auto next = std::move(self->pending_);
          self->pending_.reset();
          self->write(std::move(next));
        }
      });
  }

  void read()
  {
    ws_.async_read(
      buffer_,
      [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
          self->open_ = false;
          return;
        }
        self->handle(beast::buffers_to_string(self->buffer_.data()));
        self->buffer_.consume(self->buffer_.size());
        self->read();
      });
  }

  void handle(const std::string & text)
  {
    try {
      const auto j = nlohmann::json::parse(text);
      sink_(mission::operator_event_from_json(j, "", false));
    } catch (const std::exception & e) {
      const nlohmann::json err{{"type", "error"}, {"message", e.what()}};
      send(std::make_shared<const std::string>(err.dump()));
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  StateServer::EventSink & sink_;
  beast::flat_buffer buffer_;
  std::shared_ptr<const std::string> pending_;
  bool writing_{false};
  bool open_{false};
};

}  // namespace

struct StateServer::Impl
{
  Impl(const std::string & address, unsigned short port, EventSink s)
  : acceptor(ioc), sink(std::move(s))
  {
    beast::error_code ec;
    const auto addr = asio::ip::make_address(address, ec);
    if (ec) {
      throw InvalidParams("bad listen address '" + address + "'");
    }
    const tcp::endpoint ep{addr, port};
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep, ec);
    if (ec) {
      throw Error("cannot bind " + address + ":" + std::to_string(port) + ": " + ec.message());
    }
    acceptor.listen();
  }

  void accept()
  {
    acceptor.async_accept(
      [this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
          return;
        }
        auto session = std::make_shared<Session>(std::move(socket), sink);
        sessions.push_back(session);
        session->run(latest);
        accept();
      });
  }

  void broadcast(std::shared_ptr<const std::string> msg)
  {
    latest = msg;
    std::vector<std::weak_ptr<Session>> alive;
    for (auto & w : sessions) {
      if (auto s = w.lock()) {
        s->send(msg);
        alive.push_back(w);
      }
    }
    sessions.swap(alive);
    count.store(sessions.size());
  }

  asio::io_context ioc;
  tcp::acceptor acceptor;
  EventSink sink;
  std::vector<std::weak_ptr<Session>> sessions;  // io thread only
  std::shared_ptr<const std::string> latest;     // io thread only
  std::atomic<std::size_t> count{0};
  std::thread thread;
  std::once_flag started;
};

StateServer::StateServer(const std::string & address, unsigned short port, EventSink sink)
: impl_(std::make_unique<Impl>(address, port, std::move(sink)))
{
}

StateServer::~StateServer()
{
  stop();
}

unsigned short StateServer::port() const
{
  return impl_->acceptor.local_endpoint().port();
}

void StateServer::start()
{
  std::call_once(
    impl_->started, [this] {
      impl_->accept();
      impl_->thread = std::thread([this] {impl_->ioc.run();});
    });
}

void StateServer::stop()
{
  if (!impl_) {
    return;
  }
  if (impl_->thread.joinable()) {
    // Close sockets on the io thread so clients see EOF instead of a
    // connection that never answers.
    asio::post(
      impl_->ioc, [impl = impl_.get()] {
        beast::error_code ec;
        impl->acceptor.close(ec);
        for (auto & w : impl->sessions) {
          if (auto session = w.lock()) {
            session->shutdown();
          }
        }
        impl->ioc.stop();
      });
    impl_->thread.join();
  }
}

void StateServer::publish(std::shared_ptr<const std::string> state)
{
  asio::post(impl_->ioc, [this, state] {impl_->broadcast(state);});
}

std::size_t StateServer::session_count() const
{
  return impl_->count.load();
}

std::pair<std::string, unsigned short> parse_endpoint(const std::string & s)
{
  const auto colon = s.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size()) {
    throw InvalidParams("expected host:port, got '" + s + "'");
  }
  const std::string host = s.substr(0, colon);
  const std::string port_s = s.substr(colon + 1);
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(port_s, &used);
    if (used != port_s.size()) {
      throw InvalidParams("");
    }
  } catch (const std::exception &) {
    throw InvalidParams("bad port in '" + s + "'");
  }
  if (port < 0 || port > 65535) {
    throw InvalidParams("port out of range in '" + s + "'");
  }
  return {host, static_cast<unsigned short>(port)};
}

}  // namespace cbrn::service
