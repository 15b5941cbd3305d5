#include "circret/errors.hpp"
#include "circret/recognition.hpp"
#include "httplib.h"

namespace circret {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw TransportError("detector endpoint must be an http:// URL: " + url);
  }
  const auto slash = url.find('/', scheme.size());
  Endpoint e;
  e.origin = url.substr(0, slash);
  e.path = slash == std::string::npos ? "/" : url.substr(slash);
  if (e.origin.size() == scheme.size()) {
    throw TransportError("detector endpoint has no host: " + url);
  }
  return e;
}

std::optional<std::pair<int, int>> png_size(const std::vector<std::uint8_t>& png) {
  if (png.size() < 24) return std::nullopt;
  auto be32 = [&](std::size_t o) {
    return static_cast<int>((png[o] << 24) | (png[o + 1] << 16) | (png[o + 2] << 8) |
                            png[o + 3]);
  };
  return std::pair{be32(16), be32(20)};
}

}  // namespace

std::vector<Detection> fetch_detections(const std::string& endpoint,
                                        const std::vector<std::uint8_t>& png) {
  const Endpoint ep = split_endpoint(endpoint);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(5);
  client.set_read_timeout(60);
  auto res = client.Post(ep.path, reinterpret_cast<const char*>(png.data()),
                         png.size(), "image/png");
  if (!res) {
    throw TransportError("detector request to " + endpoint +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("detector returned HTTP " + std::to_string(res->status));
  }
  std::vector<Detection> dets = parse_detections(res->body);
  validate_detections(dets, png_size(png));
  return dets;
}

}  // namespace circret
