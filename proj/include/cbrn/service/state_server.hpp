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

#ifndef CBRN__SERVICE__STATE_SERVER_HPP_
#define CBRN__SERVICE__STATE_SERVER_HPP_

#include <functional>
#include <memory>
#include <string>

#include "cbrn/mission/events.hpp"

namespace cbrn::service
{

/// WebSocket endpoint for the operator console. Client messages are
/// {type, payload} events handed to `sink`; published state messages are
/// pushed to every client, each client only ever receiving the newest one
/// it has not yet been sent.
class StateServer
{
public:
  using EventSink = std::function<void(mission::OperatorEvent)>;

  /// Binds immediately; port 0 picks a free port.
  StateServer(const std::string & address, unsigned short port, EventSink sink);
  ~StateServer();

  StateServer(const StateServer &) = delete;
  StateServer & operator=(const StateServer &) = delete;

  unsigned short port() const;
  /// Starts the network thread.
  void start();
  void stop();
  /// Thread-safe.
  void publish(std::shared_ptr<const std::string> state);
  std::size_t session_count() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// "host:port" -> (host, port). Throws InvalidParams.
std::pair<std::string, unsigned short> parse_endpoint(const std::string & s);

}  // namespace cbrn::service

#endif  // CBRN__SERVICE__STATE_SERVER_HPP_
