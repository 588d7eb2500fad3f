//! Float math routed through std or libm depending on the build.

#![allow(dead_code)]

macro_rules! shim {
    ($name:ident, $std:ident, $libm:ident, 1) => {
        #[inline]
        pub(crate) fn $name(x: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$std()
            }
            #[cfg(not(feature = "std"))]
            {
                libm::$libm(x)
            }
        }
    };
    ($name:ident, $std:ident, $libm:ident, 2) => {
        #[inline]
        pub(crate) fn $name(x: f64, y: f64) -> f64 {
            #[cfg(feature = "std")]
            {
                x.$std(y)
            }
            #[cfg(not(feature = "std"))]
            {
                libm::$libm(x, y)
            }
        }
    };
}

shim!(abs, abs, fabs, 1);
shim!(floor, floor, floor, 1);
shim!(ceil, ceil, ceil, 1);
shim!(round, round, round, 1);
shim!(sqrt, sqrt, sqrt, 1);
shim!(cbrt, cbrt, cbrt, 1);
shim!(exp, exp, exp, 1);
shim!(ln, ln, log, 1);
shim!(log2, log2, log2, 1);
shim!(log10, log10, log10, 1);
shim!(cos, cos, cos, 1);
shim!(acos, acos, acos, 1);
shim!(powf, powf, pow, 2);
shim!(hypot, hypot, hypot, 2);
