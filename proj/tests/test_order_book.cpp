#include <cmath>
#include <vector>

#include "doctest.h"
#include "rlmarket/config.hpp"
#include "rlmarket/order_book.hpp"
#include "support/oracles.hpp"

using namespace rlmarket;

namespace {

Order bid(int agent, double price, std::int64_t qty, int rank) {
  return {agent, Side::bid, price, qty, rank};
}
Order ask(int agent, double price, std::int64_t qty, int rank) {
  return {agent, Side::ask, price, qty, rank};
}

MarketUpdate carry(double price, double spread) {
  MarketUpdate m;
  m.last_price = price;
  m.spread = spread;
  return m;
}

}  // namespace

TEST_CASE("quantize_price rounds half away from zero") {
  CHECK(quantize_price(100.237, 0) == 100.0);
  CHECK(quantize_price(100.235, 2) == 100.24);
  CHECK(quantize_price(100.0, 5) == 100.0);
  CHECK(quantize_price(100.5, 0) == 101.0);
  CHECK(quantize_price(0.004, 2) == 0.0);
  CHECK_THROWS_AS(quantize_price(0.0, 2), std::domain_error);
  CHECK_THROWS_AS(quantize_price(-1.0, 2), std::domain_error);
  CHECK_THROWS_AS(quantize_price(100.0, 6), std::domain_error);
}

TEST_CASE("quantized prices sit on the tick grid for every digit setting") {
  Rng rng(3);
  for (int d = 0; d <= 5; ++d) {
    for (int i = 0; i < 1000; ++i) {
      const double p = quantize_price(rng.uniform(1.0, 500.0), d);
      if (p > 0.0) CHECK(on_tick_grid(p, d));
    }
  }
  CHECK(tick_size(0) == 1.0);
  CHECK(tick_size(3) == doctest::Approx(0.001));
}

TEST_CASE("two bids against two asks with a partial fill") {
  const std::vector<Order> orders{bid(0, 101, 10, 0), bid(1, 100, 5, 1), ask(2, 99, 8, 2),
                                  ask(3, 100.5, 4, 3)};
  const auto m = clear_auction(orders, 2, carry(100, 0));
  REQUIRE(m.transactions.size() == 2);
  CHECK(m.transactions[0].price == 100.0);
  CHECK(m.transactions[0].quantity == 8);
  CHECK(m.transactions[1].price == 100.75);
  CHECK(m.transactions[1].quantity == 2);
  CHECK(m.last_price == 100.75);
  CHECK(m.volume == 10);
  CHECK(m.spread == doctest::Approx(1.25));
}

TEST_CASE("uncrossed book carries price and spread forward") {
  const std::vector<Order> orders{bid(0, 99, 5, 0), ask(1, 100, 5, 1)};
  const auto m = clear_auction(orders, 2, carry(98.5, 0.7));
  CHECK(m.transactions.empty());
  CHECK(m.last_price == 98.5);
  CHECK(m.spread == 0.7);
  CHECK(m.volume == 0);
}

TEST_CASE("touching quotes trade at the common price with zero spread") {
  const std::vector<Order> orders{bid(0, 100, 5, 0), ask(1, 100, 5, 1)};
  const auto m = clear_auction(orders, 2, carry(90, 3));
  REQUIRE(m.transactions.size() == 1);
  CHECK(m.last_price == 100.0);
  CHECK(m.volume == 5);
  CHECK(m.spread == 0.0);
}

TEST_CASE("empty book returns the carry-forward update") {
  const auto m = clear_auction({}, 2, carry(101.1, 2.5));
  CHECK(m.transactions.empty());
  CHECK(m.last_price == 101.1);
  CHECK(m.spread == 2.5);
}

TEST_CASE("off-grid mid is re-quantized") {
  const std::vector<Order> orders{bid(0, 101, 1, 0), ask(1, 100, 1, 1)};
  CHECK(clear_auction(orders, 0, carry(100, 0)).last_price == 101.0);
}

TEST_CASE("equal limits are served in arrival order") {
  const std::vector<Order> orders{bid(0, 100, 3, 1), bid(1, 100, 3, 0), ask(2, 99, 4, 2)};
  const auto m = clear_auction(orders, 2, carry(100, 0));
  REQUIRE(m.transactions.size() == 2);
  CHECK(m.transactions[0].buyer_id == 1);
  CHECK(m.transactions[0].quantity == 3);
  CHECK(m.transactions[1].buyer_id == 0);
  CHECK(m.transactions[1].quantity == 1);
}

TEST_CASE("self-match is an invariant violation") {
  const std::vector<Order> orders{bid(4, 101, 1, 0), ask(4, 100, 1, 1)};
  CHECK_THROWS_AS(clear_auction(orders, 2, carry(100, 0)), InvariantViolation);
}

TEST_CASE("clearing matches the brute-force matcher on random books") {
  Rng rng(2024);
  for (int i = 0; i < 3000; ++i) {
    const int digits = static_cast<int>(rng.uniform_int(0, 3));
    const auto orders = oracle::random_book(rng, digits);
    const auto prev = carry(100.0, 1.0);
    const auto fast = clear_auction(orders, digits, prev, i);
    const auto ref = oracle::reference_clear(orders, digits, prev, i);
    REQUIRE(oracle::same_update(fast, ref));
  }
}

TEST_CASE("every transaction clears between its limits, on the grid") {
  Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const int digits = static_cast<int>(rng.uniform_int(0, 5));
    const auto orders = oracle::random_book(rng, digits);
    const auto m = clear_auction(orders, digits, carry(100, 0));
    std::int64_t v = 0;
    for (const auto& tx : m.transactions) {
      CHECK(tx.ask_limit <= tx.price);
      CHECK(tx.price <= tx.bid_limit);
      CHECK(on_tick_grid(tx.price, digits));
      CHECK(tx.buyer_id != tx.seller_id);
      v += tx.quantity;
    }
    CHECK(v == m.volume);
  }
}

TEST_CASE("settle charges the fee to both sides") {
  std::vector<Portfolio> p(2);
  p[0].cash = Money::from_double(5000);
  p[1].cash = Money::from_double(5000);
  p[1].shares = 10;
  Transaction tx;
  tx.buyer_id = 0;
  tx.seller_id = 1;
  tx.price = 100;
  tx.quantity = 10;
  const std::vector<Transaction> txs{tx};
  const Money fees = settle(txs, p, 0.001);
  CHECK(p[0].cash == Money::from_double(5000 - 1001));
  CHECK(p[0].shares == 10);
  CHECK(p[1].cash == Money::from_double(5000 + 999));
  CHECK(p[1].shares == 0);
  CHECK(fees == Money::from_double(2));
}

TEST_CASE("a £1000 transaction at 0.1% costs £1 in fees per side") {
  std::vector<Portfolio> p(2);
  p[0].cash = Money::from_double(2000);
  p[1].shares = 10;
  p[1].cash = Money::from_double(10);
  Transaction tx{0, 1, 100.0, 10};
  std::vector<Money> by_agent(2);
  settle(std::vector<Transaction>{tx}, p, 0.001, by_agent);
  CHECK(by_agent[0] == Money::from_double(1));
  CHECK(by_agent[1] == Money::from_double(1));
}

TEST_CASE("sequential settlements compose additively") {
  std::vector<Portfolio> a(2), b(2);
  for (auto* ps : {&a, &b}) {
    (*ps)[0].cash = Money::from_double(10000);
    (*ps)[1].shares = 50;
    (*ps)[1].cash = Money::from_double(100);
  }
  const Transaction t1{0, 1, 99.5, 7};
  const Transaction t2{0, 1, 100.25, 3};
  settle(std::vector<Transaction>{t1, t2}, a, 0.001);
  settle(std::vector<Transaction>{t1}, b, 0.001);
  settle(std::vector<Transaction>{t2}, b, 0.001);
  CHECK(a[0].cash == b[0].cash);
  CHECK(a[1].cash == b[1].cash);
  CHECK(a[0].shares == b[0].shares);
}

TEST_CASE("settlement conserves shares and removes exactly the fees") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const auto orders = oracle::random_book(rng, 2);
    std::vector<Portfolio> p(10);
    for (auto& x : p) {
      x.cash = Money::from_double(1e6);
      x.shares = 100;
    }
    const auto m = clear_auction(orders, 2, carry(100, 0));
    const Money fees = settle(m.transactions, p, 0.001);
    Money cash;
    std::int64_t shares = 0;
    for (const auto& x : p) {
      cash += x.cash;
      shares += x.shares;
    }
    CHECK(shares == 1000);
    CHECK(cash == Money::from_double(1e7) - fees);
  }
}

TEST_CASE("insolvent settlement is an invariant violation") {
  std::vector<Portfolio> p(2);
  p[0].cash = Money::from_double(10);
  p[1].shares = 5;
  const std::vector<Transaction> txs{{0, 1, 100.0, 5}};
  CHECK_THROWS_AS(settle(txs, p, 0.001), InvariantViolation);

  std::vector<Portfolio> q(2);
  q[0].cash = Money::from_double(1e4);
  q[1].shares = 2;
  CHECK_THROWS_AS(settle(txs, q, 0.001), InvariantViolation);
}
