#pragma once

#include "prange/error.hpp"
#include "prange/model.hpp"
#include "prange/session.hpp"

#include <memory>
#include <string>

namespace prange {

/// HTTP status for a session error: 400 bad input, 409 wrong state,
/// 422 rejected value or failed solve.
int http_status(ErrorCode code);

/// One model, at most one editing session, per process. Range computation
/// runs on a background worker; GET /api/ranges answers 202 until done.
class Service {
public:
    Service(ConstraintSystem sys, SessionConfig cfg);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds to host:port (port 0 picks a free one) and returns the port.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    void run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace prange
