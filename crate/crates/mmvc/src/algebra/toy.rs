//! Small explicit group for exhaustive testing and Monte Carlo work.
//!
//! The group is the order-101 subgroup of Z_607^*. 607 is prime and
//! 606 = 2 * 3 * 101, so the subgroup of index 6 has prime order 101.
//! 3 is a primitive root mod 607; the generator is 3^6 = 122. Membership
//! is decidable by a single exponentiation: x is in the subgroup iff
//! x^101 = 1 (mod 607).
//!
//! Scalars are elements of Z_101 held as `u64`; group elements are their
//! canonical representatives in [1, 607) held as `u16`.

/// Prime modulus of the ambient field Z_607.
pub const MODULUS: u32 = 607;

/// Prime order of the subgroup, i.e. the scalar field size p.
pub const ORDER: u64 = 101;

/// Canonical generator 3^6 mod 607.
pub const GENERATOR: u16 = 122;

/// Scalar encoding width in bytes.
pub const SCALAR_LEN: usize = 1;

/// Element encoding width in bytes (big-endian representative).
pub const ELEMENT_LEN: usize = 2;

const fn build_subgroup() -> [u16; ORDER as usize] {
    let mut table = [0u16; ORDER as usize];
    let mut acc: u32 = 1;
    let mut i = 0;
    while i < ORDER as usize {
        table[i] = acc as u16;
        acc = acc * GENERATOR as u32 % MODULUS;
        i += 1;
    }
    table
}

/// All 101 subgroup elements; `SUBGROUP[i] = GENERATOR^i mod 607`.
pub const SUBGROUP: [u16; ORDER as usize] = build_subgroup();

/// Square-and-multiply exponentiation in Z_607.
pub fn modpow(base: u16, mut exp: u64) -> u16 {
    let mut base = u64::from(base) % u64::from(MODULUS);
    let mut acc: u64 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % u64::from(MODULUS);
        }
        base = base * base % u64::from(MODULUS);
        exp >>= 1;
    }
    acc as u16
}

/// Product of two representatives in Z_607.
pub fn mul(a: u16, b: u16) -> u16 {
    (u32::from(a) * u32::from(b) % MODULUS) as u16
}

/// True iff `x` represents a subgroup member: x in [1, 607) and x^101 = 1.
pub fn is_member(x: u16) -> bool {
    x >= 1 && u32::from(x) < MODULUS && modpow(x, ORDER) == 1
}

/// Inverse inside the subgroup: x^100, since x^101 = 1.
pub fn invert(x: u16) -> u16 {
    modpow(x, ORDER - 1)
}
