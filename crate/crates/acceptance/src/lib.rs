//! Holds the `acceptance` test target (`cargo test -p hyperkahler-acceptance`).
//! Kept as its own package so the other suites run before it.
