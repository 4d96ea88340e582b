//! Shared inputs for the criterion benchmarks.

use optomech::fixtures;
use optomech::System;

pub fn device_one() -> System {
    fixtures::device_one().expect("device-1 fixture")
}

pub fn device_two() -> System {
    fixtures::device_two().expect("device-2 fixture")
}
