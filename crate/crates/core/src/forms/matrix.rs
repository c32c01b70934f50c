use super::FormError;
use crate::arith::{rat, rational_to_string};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Invertible 2×2 rational matrix `(a₁ a₂ / a₃ a₄)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    a: [BigRational; 4],
    det: BigRational,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_strings();
        write!(f, "[[{}, {}], [{}, {}]]", s[0], s[1], s[2], s[3])
    }
}

impl RationalMatrix {
    pub fn new(a1: BigRational, a2: BigRational, a3: BigRational, a4: BigRational) -> Result<Self, FormError> {
        let det = &a1 * &a4 - &a2 * &a3;
        if det.is_zero() {
            return Err(FormError::SingularMatrix);
        }
        Ok(RationalMatrix { a: [a1, a2, a3, a4], det })
    }

    pub fn from_ints(a1: i64, a2: i64, a3: i64, a4: i64) -> Result<Self, FormError> {
        Self::new(rat(a1), rat(a2), rat(a3), rat(a4))
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1).unwrap()
    }

    pub fn entries(&self) -> &[BigRational; 4] {
        &self.a
    }

    pub fn det(&self) -> &BigRational {
        &self.det
    }

    pub fn is_integral(&self) -> bool {
        self.a.iter().all(|x| x.is_integer())
    }

    /// Matrix product `self · other`; composition satisfies
    /// `(F∘A)∘B = F∘(A·B)`.
    pub fn mul(&self, o: &RationalMatrix) -> RationalMatrix {
        let [a, b, c, d] = &self.a;
        let [e, f, g, h] = &o.a;
        Self::new(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h).expect("product of invertible matrices")
    }

    pub fn inverse(&self) -> RationalMatrix {
        let [a, b, c, d] = &self.a;
        let t = &self.det;
        Self::new(d / t, -(b / t), -(c / t), a / t).expect("inverse of invertible matrix")
    }

    pub fn scale(&self, s: &BigRational) -> RationalMatrix {
        let [a, b, c, d] = &self.a;
        Self::new(a * s, b * s, c * s, d * s).expect("nonzero scalar")
    }

    pub fn neg(&self) -> RationalMatrix {
        self.scale(&-BigRational::one())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Representative of the projective class with first nonzero entry 1.
    pub fn canonical(&self) -> RationalMatrix {
        let lead = self.a.iter().find(|x| !x.is_zero()).unwrap().clone();
        self.scale(&(BigRational::one() / lead))
    }

    /// Action on projective coordinates: `(x:y) ↦ (a₁x + a₂y : a₃x + a₄y)`.
    pub fn act(&self, p: &(BigRational, BigRational)) -> (BigRational, BigRational) {
        let [a, b, c, d] = &self.a;
        (a * &p.0 + b * &p.1, c * &p.0 + d * &p.1)
    }

    pub fn to_strings(&self) -> [String; 4] {
        self.a.clone().map(|x| rational_to_string(&x))
    }

    pub fn from_big(a: [BigInt; 4]) -> Result<Self, FormError> {
        let [a1, a2, a3, a4] = a.map(BigRational::from_integer);
        Self::new(a1, a2, a3, a4)
    }
}

/// Serialized as four rational strings `[a₁, a₂, a₃, a₄]`.
impl Serialize for RationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = <[String; 4]>::deserialize(d)?;
        let q = v
            .iter()
            .map(|x| crate::arith::parse_rational(x).ok_or_else(|| serde::de::Error::custom(format!("bad rational {x}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let [a1, a2, a3, a4]: [BigRational; 4] = q.try_into().unwrap();
        Self::new(a1, a2, a3, a4).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_product() {
        let g = RationalMatrix::from_ints(2, 1, 5, 3).unwrap();
        assert!(g.mul(&g.inverse()).is_identity());
        assert_eq!(RationalMatrix::from_ints(1, 2, 2, 4), Err(FormError::SingularMatrix));
    }

    #[test]
    fn canonical_scaling() {
        let g = RationalMatrix::from_ints(0, 3, 6, 9).unwrap().canonical();
        assert_eq!(g, RationalMatrix::from_ints(0, 1, 2, 3).unwrap());
    }
}
