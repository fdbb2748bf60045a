#include "doctest.h"

#include "suites.hpp"

#include "topo/broker.hpp"
#include "topo/expr.hpp"
#include "topo/socket.hpp"
#include "topo/wire.hpp"

#include <random>
#include <set>
#include <thread>

using namespace topo;
using namespace topo::wire;

using support::contains_delimiter;
using support::random_payload;

TEST_CASE("frame examples") {
  CHECK(frame("abc") == "<?scscp start ?>\nabc\n<?scscp end ?>\n");
  CHECK(frame("") == "<?scscp start ?>\n\n<?scscp end ?>\n");
  CHECK_THROWS_AS(frame("x<?scscp end ?>y"), FramingError);
  CHECK_THROWS_AS(frame("<?scscp start ?>"), FramingError);
}

TEST_CASE("deframe examples") {
  StringStream one(frame("abc"));
  Reader r1(one);
  CHECK(deframe(r1) == "abc");

  StringStream two(frame("a") + "\n  " + frame("b"));
  Reader r2(two);
  CHECK(deframe(r2) == "a");
  CHECK(deframe(r2) == "b");
  CHECK(!r2.next_frame());

  const std::string full = frame("abcdef");
  for (std::size_t cut = 1; cut < full.size(); ++cut) {
    StringStream s(full.substr(0, cut));
    Reader r(s);
    CHECK_THROWS_AS(deframe(r), TruncationError);
  }
  StringStream empty("");
  Reader r3(empty);
  CHECK_THROWS_AS(deframe(r3), TruncationError);

  StringStream junk("hello" + frame("a"));
  Reader r4(junk);
  CHECK_THROWS_AS(deframe(r4), ProtocolError);
}

TEST_CASE("deframe inverts frame on random payloads") {
  std::mt19937_64 rng(99);
  std::vector<std::string> payloads;
  while (payloads.size() < 1000) {
    std::string p = random_payload(rng);
    if (!contains_delimiter(p)) payloads.push_back(p);
  }
  std::string stream_bytes;
  for (const auto& p : payloads) {
    StringStream s(frame(p));
    Reader r(s);
    REQUIRE(deframe(r) == p);
    stream_bytes += frame(p);
  }
  StringStream all(stream_bytes);
  Reader r(all);
  for (const auto& p : payloads) REQUIRE(deframe(r) == p);
  CHECK(!r.next_frame());
}

TEST_CASE("message round trip") {
  const Term s4 = to_term(SpaceExpr::sphere(4));
  Message call = Message::call(Symbol{"algtop1", "homology"}, {s4, integer(4)}, "id-7");
  const Term t = decode(encode(to_term(call)));
  CHECK(t.is_apply_of("proto1", "procedure_call"));
  Message back = message_from_term(t);
  CHECK(back.kind == Message::Kind::Call);
  CHECK(back.call_id == "id-7");
  CHECK(back.procedure == Symbol{"algtop1", "homology"});
  REQUIRE(back.args.size() == 2);
  CHECK(back.args[0] == s4);
  CHECK(back.args[1] == integer(4));

  Message done = message_from_term(to_term(Message::completed("x", integer(3))));
  CHECK(done.kind == Message::Kind::Completed);
  CHECK(done.result == integer(3));

  Message term = message_from_term(to_term(Message::terminated("y", "unknown_procedure", "no")));
  CHECK(term.kind == Message::Kind::Terminated);
  CHECK(term.error_code == "unknown_procedure");
  CHECK(term.error_text == "no");

  CHECK_THROWS_AS(message_from_term(integer(1)), ProtocolError);
}

TEST_CASE("negotiation") {
  SUBCASE("well-behaved peers agree on 1.3") {
    auto [a, b] = socket_pair();
    std::string server_version;
    std::thread server([&server_version, s = std::move(b)]() mutable {
      Connection conn(std::move(s));
      server_version = negotiate_server(conn);
    });
    Connection client(std::move(a));
    CHECK(negotiate_client(client) == "1.3");
    server.join();
    CHECK(server_version == "1.3");
  }
  SUBCASE("unsupported version gets quit and close") {
    auto [a, b] = socket_pair();
    bool threw = false;
    std::thread server([&threw, s = std::move(b)]() mutable {
      Connection conn(std::move(s));
      try {
        negotiate_server(conn);
      } catch (const ProtocolError&) {
        threw = true;
      }
    });
    Connection client(std::move(a));
    negotiate_client(client, "9.9");
    CHECK(client.recv_line() == "<?scscp quit reason=\"unsupported version\" ?>");
    CHECK(!client.recv_line());
    server.join();
    CHECK(threw);
  }
  SUBCASE("garbage greeting") {
    Connection client(std::make_unique<StringStream>("HELLO THERE\n"));
    CHECK_THROWS_AS(negotiate_client(client), ProtocolError);
  }
  SUBCASE("greeting text") {
    auto stream = std::make_unique<StringStream>("");
    auto* raw = stream.get();
    Connection conn(std::move(stream));
    CHECK_THROWS_AS(negotiate_server(conn), TransportError);
    CHECK(raw->output() == "<?scscp service_name=\"topobroker\" scscp_versions=\"1.3\" ?>\n");
  }
}

TEST_CASE("calls against served kernels") {
  auto serve = [](std::shared_ptr<Kernel> kernel) {
    auto [a, b] = socket_pair();
    std::thread server([kernel, s = std::move(b)]() mutable {
      Connection conn(std::move(s));
      serve_connection(conn, kernel_handler(kernel));
    });
    return std::make_pair(std::make_unique<Connection>(std::move(a)), std::move(server));
  };

  auto [conn, server] = serve(make_grouphom_kernel());
  negotiate_client(*conn);
  send_call(*conn, Symbol{"grp1", "group_homology"}, {to_term(GroupExpr::cyclic(5)), integer(5)}, "c1");
  Message r = recv_reply(*conn, "c1");
  REQUIRE(r.kind == Message::Kind::Completed);
  CHECK(*r.result == apply("res1", "fg_abelian", {integer(0), make_list({integer(5)})}));

  send_call(*conn, Symbol{"algtop1", "em_space"}, {integer(1), integer(2)}, "c2");
  r = recv_reply(*conn, "c2");
  CHECK(r.kind == Message::Kind::Terminated);
  CHECK(r.error_code == "unknown_procedure");

  send_call(*conn, Symbol{"grp1", "group_homology"}, {integer(5)}, "c3");
  r = recv_reply(*conn, "c3");
  CHECK(r.kind == Message::Kind::Terminated);
  CHECK(r.error_code == "invalid_arguments");
  conn->close();
  server.join();

  auto [conn2, server2] = serve(make_simplicial_kernel());
  negotiate_client(*conn2);
  send_call(*conn2, Symbol{"algtop1", "homology"}, {to_term(SpaceExpr::sphere(4)), integer(4)}, "k");
  r = recv_reply(*conn2, "k");
  REQUIRE(r.kind == Message::Kind::Completed);
  CHECK(*r.result == apply("res1", "fg_abelian", {integer(1), make_list({})}));
  conn2->close();
  server2.join();
}

TEST_CASE("reply for another call id is a protocol error") {
  Connection conn(std::make_unique<StringStream>(
      frame(encode(to_term(Message::completed("other", integer(1)))))));
  CHECK_THROWS_AS(recv_reply(conn, "mine"), ProtocolError);
}

TEST_CASE("dropped connection becomes a system_specific termination") {
  Connection conn(std::make_unique<StringStream>(""));
  Message m = recv_reply(conn, "c9");
  CHECK(m.kind == Message::Kind::Terminated);
  CHECK(m.error_code == "system_specific");
  CHECK(m.call_id == "c9");
}

TEST_CASE("one reply per call, stable transcript") {
  const auto first = support::run_wire_session();
  const auto second = support::run_wire_session();
  CHECK(first.transcript == second.transcript);
  CHECK(first.transcript == support::read_file(std::string(TOPO_GOLDEN_DIR) + "/wire_session.txt"));

  std::size_t replies = 0;
  std::set<std::string> ids;
  for (std::size_t pos = 0; (pos = first.transcript.find("procedure_c", pos)) != std::string::npos; ++pos) {
    if (first.transcript.compare(pos, 19, "procedure_completed") == 0) ++replies;
  }
  for (std::size_t pos = 0; (pos = first.transcript.find("procedure_terminated", pos)) != std::string::npos; ++pos)
    ++replies;
  CHECK(replies == 2);
  REQUIRE(first.replies.size() == 2);
  CHECK(first.replies[0].kind == Message::Kind::Completed);
  CHECK(first.replies[1].error_code == "unknown_procedure");
}

TEST_CASE("tcp server") {
  Server server(kernel_handler(make_grouphom_kernel()), 0);
  Connection conn(connect_tcp("127.0.0.1", server.port()));
  negotiate_client(conn);
  send_call(conn, Symbol{"grp1", "group_homology"}, {to_term(GroupExpr::cyclic(4)), integer(3)}, "t");
  Message r = recv_reply(conn, "t");
  REQUIRE(r.kind == Message::Kind::Completed);
  CHECK(group_from_result(*r.result) == FgAbelianGroup::cyclic(4));
  conn.close();
  server.stop();
  CHECK_THROWS_AS(connect_tcp("127.0.0.1", server.port()), TransportError);
}

TEST_CASE("endpoints") {
  CHECK(parse_endpoint("localhost:26133") == std::make_pair(std::string("localhost"), std::uint16_t(26133)));
  CHECK_THROWS_AS(parse_endpoint("nope"), UserError);
  CHECK_THROWS_AS(parse_endpoint("h:99999"), UserError);
}
