#include "netting/service.hpp"

#include <httplib.h>

#include "netting/error.hpp"

namespace netting::service {

using documents::Json;
using store::EntityKind;

struct Server::Impl {
  explicit Impl(store::LifecycleStore& s) : bench(s) {}
  workbench::Workbench bench;
  httplib::Server http;
};

namespace {

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(documents::canonical(body), "application/json");
}

std::string actor_of(const httplib::Request& req) {
  auto a = req.get_header_value("X-Actor");
  return a.empty() ? "analyst" : a;
}

std::optional<std::uint64_t> query_version(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  try {
    return std::stoull(req.get_param_value(key));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidDocument, std::string("bad ") + key);
  }
}

Json body_of(const httplib::Request& req) {
  return req.body.empty() ? Json::object() : documents::parse(req.body);
}

// Wraps a handler: JSON in, JSON out, domain errors mapped to status codes.
template <class Fn>
httplib::Server::Handler handle(Fn fn, int ok_status = 200) {
  return [fn, ok_status](const httplib::Request& req, httplib::Response& res) {
    try {
      reply(res, ok_status, fn(req));
    } catch (const Error& e) {
      reply(res, workbench::http_status(e.code()), workbench::error_body(e));
    } catch (const std::exception& e) {
      reply(res, 500, workbench::error_body(e));
    }
  };
}

}  // namespace

Server::Server(store::LifecycleStore& store) : impl_(std::make_unique<Impl>(store)) {
  auto& http = impl_->http;
  auto& b = impl_->bench;

  http.Get("/health", handle([](const auto&) { return Json{{"status", "ok"}}; }));
  http.Get("/reasons", handle([](const auto&) { return workbench::reason_ids(); }));

  http.Get("/vocabulary", handle([&b](const auto&) { return b.vocabulary(); }));
  http.Post("/vocabulary/terms",
            handle([&b](const auto& req) { return b.add_term(body_of(req), actor_of(req)); }, 201));
  http.Post("/parse", handle([&b](const auto& req) { return b.parse(body_of(req)); }));
  http.Post("/render", handle([&b](const auto& req) { return b.render(body_of(req)); }));

  // Versioned entities: opinions, policies, facts.
  struct Entity {
    const char* path;
    EntityKind kind;
  };
  for (Entity e : {Entity{"opinions", EntityKind::Opinion}, Entity{"policies", EntityKind::Policy},
                   Entity{"facts", EntityKind::Facts}}) {
    std::string base = std::string("/") + e.path + "/([A-Za-z0-9._-]+)";
    EntityKind kind = e.kind;
    http.Put(base, handle([&b, kind](const httplib::Request& req) {
               auto id = req.matches[1].str();
               auto v = query_version(req, "baseVersion");
               Json doc = body_of(req);
               switch (kind) {
                 case EntityKind::Opinion: return b.put_opinion(id, doc, v, actor_of(req));
                 case EntityKind::Policy: return b.put_policy(id, doc, v, actor_of(req));
                 default: return b.put_facts(id, doc, v, actor_of(req));
               }
             }, 201));
    http.Get(base, handle([&b, kind](const httplib::Request& req) {
               return b.get(kind, req.matches[1].str(), query_version(req, "version"));
             }));
    http.Get(base + "/versions", handle([&b, kind](const httplib::Request& req) {
               return b.versions(kind, req.matches[1].str());
             }));
  }
  http.Post("/opinions/([A-Za-z0-9._-]+)/items/([A-Za-z0-9._-]+)/verification",
            handle([&b](const httplib::Request& req) {
              Json r = body_of(req);
              if (!r.contains("analystId")) r["analystId"] = actor_of(req);
              return b.verify_item(req.matches[1].str(), req.matches[2].str(), r);
            }));

  http.Post("/determinations",
            handle([&b](const auto& req) { return b.determine(body_of(req), actor_of(req)); }, 201));
  http.Get("/determinations/([A-Za-z0-9._-]+)", handle([&b](const httplib::Request& req) {
             return b.get(EntityKind::Determination, req.matches[1].str(),
                          query_version(req, "version"));
           }));
  http.Get("/determinations/([A-Za-z0-9._-]+)/versions", handle([&b](const httplib::Request& req) {
             return b.versions(EntityKind::Determination, req.matches[1].str());
           }));
  http.Post("/determinations/([A-Za-z0-9._-]+)/override",
            handle([&b](const httplib::Request& req) {
              Json r = body_of(req);
              if (!r.contains("actor")) r["actor"] = actor_of(req);
              return b.set_override(req.matches[1].str(), r);
            }));
  http.Post("/whatif", handle([&b](const auto& req) { return b.what_if(body_of(req)); }));

  http.Post("/exposures", handle([](const auto& req) { return workbench::exposures(body_of(req)); }));
  http.Post("/costmodel", handle([](const auto& req) {
              Json r = body_of(req);
              std::optional<Decimal> rate;
              if (r.contains("dayRate") && !r["dayRate"].is_null())
                rate = documents::decimal_of(r["dayRate"]);
              return workbench::cost_model(r.contains("params") ? r["params"] : r, rate);
            }));

  http.Post("/events",
            handle([&b](const auto& req) { return b.event(body_of(req), actor_of(req)); }));
  http.Post("/sweep",
            handle([&b](const auto& req) { return b.sweep(body_of(req), actor_of(req)); }));
  http.Get("/audit", handle([&b](const httplib::Request& req) {
             if (req.has_param("kind"))
               return b.audit(store::kind_from_name(req.get_param_value("kind")),
                              req.get_param_value("id"));
             return b.audit(std::nullopt, {});
           }));
  http.Get("/audit/verify", handle([&b](const auto&) { return b.verify_store(); }));
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool Server::listen() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace netting::service
