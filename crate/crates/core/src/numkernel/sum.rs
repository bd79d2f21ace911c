//! Neumaier-compensated accumulation for `Float` and `HPComplex`.

use rug::Float;

use super::complex::HPComplex;

#[derive(Clone, Debug)]
pub struct CompensatedSum {
    sum: Float,
    comp: Float,
}

impl CompensatedSum {
    pub fn new(prec: u32) -> Self {
        Self {
            sum: Float::new(prec),
            comp: Float::new(prec),
        }
    }

    pub fn add(&mut self, x: &Float) {
        let p = self.sum.prec();
        let t = Float::with_val(p, &self.sum + x);
        let err = if Float::with_val(p, self.sum.abs_ref()) >= Float::with_val(p, x.abs_ref()) {
            Float::with_val(p, &self.sum - &t) + x
        } else {
            Float::with_val(p, x - &t) + &self.sum
        };
        self.comp += err;
        self.sum = t;
    }

    pub fn value(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum + &self.comp)
    }
}

#[derive(Clone, Debug)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub fn new(prec: u32) -> Self {
        Self {
            re: CompensatedSum::new(prec),
            im: CompensatedSum::new(prec),
        }
    }

    pub fn add(&mut self, z: &HPComplex) {
        self.re.add(&z.re);
        self.im.add(&z.im);
    }

    pub fn value(&self) -> HPComplex {
        HPComplex::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of a sequence of complex values, in iteration order.
pub fn sum_complex<'a>(prec: u32, items: impl IntoIterator<Item = &'a HPComplex>) -> HPComplex {
    let mut acc = CompensatedComplexSum::new(prec);
    for z in items {
        acc.add(z);
    }
    acc.value()
}
