//! Collision test for strictly periodic intervals.

use crate::time::{gcd, modulo, TimeNs};

/// Whether `[o1 + m*p1, o1 + m*p1 + d1)` and `[o2 + n*p2, o2 + n*p2 + d2)`
/// intersect for some integers `m`, `n`. Requires `d1 <= p1`, `d2 <= p2` and
/// positive periods.
pub fn collides_periodic(o1: TimeNs, d1: TimeNs, p1: TimeNs, o2: TimeNs, d2: TimeNs, p2: TimeNs) -> bool {
    collides(o1.0, d1.0, p1.0, o2.0, d2.0, p2.0)
}

#[inline]
pub(crate) fn collides(o1: u64, d1: u64, p1: u64, o2: u64, d2: u64, p2: u64) -> bool {
    if d1 == 0 || d2 == 0 {
        return false;
    }
    let g = gcd(p1, p2);
    let diff = o2 as i128 - o1 as i128;
    modulo(diff, g) < d1 || modulo(-diff, g) < d2
}
