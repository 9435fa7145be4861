#![allow(dead_code)]

pub mod oracles;

use liftforge_core::{builtin_bank, Builtin, CascadeFactor, CausalPoly, FieldContext, Perm, PolyMatrix2};

pub fn q() -> FieldContext {
    FieldContext::rational()
}

pub fn q3() -> FieldContext {
    FieldContext::quadratic(3).unwrap()
}

pub fn cdf75() -> PolyMatrix2 {
    builtin_bank(Builtin::Cdf75).to_polyphase()
}

pub fn daub44() -> PolyMatrix2 {
    builtin_bank(Builtin::Daub44).to_polyphase()
}

/// Factor list from `·`-separated items: `G a, b`, `U filter`, `L filter`,
/// `D0 m`, `D1 m`, `J`.
pub fn factors(text: &str, ctx: FieldContext) -> Vec<CascadeFactor> {
    text.split('·')
        .map(|item| {
            let item = item.trim();
            let (tag, rest) = item.split_once(' ').unwrap_or((item, ""));
            let poly = |s: &str| CausalPoly::parse(s, ctx).unwrap_or_else(|e| panic!("{s}: {e}"));
            match tag {
                "G" => {
                    let (a, b) = rest.split_once(',').unwrap();
                    CascadeFactor::Gain(ctx.parse(a.trim()).unwrap(), ctx.parse(b.trim()).unwrap())
                }
                "U" => CascadeFactor::upper(poly(rest)),
                "L" => CascadeFactor::lower(poly(rest)),
                "D0" => CascadeFactor::Delay { chi: 0, m: rest.trim().parse().unwrap() },
                "D1" => CascadeFactor::Delay { chi: 1, m: rest.trim().parse().unwrap() },
                "J" => CascadeFactor::Perm(Perm::J),
                other => panic!("unknown factor tag {other}"),
            }
        })
        .collect()
}

pub const EEA_COL0: &str =
    "G -50, -1/50 · U (-13+3z^-1)/10000 · L 725+125z^-1 · U -(1+5z^-1)/100 · D0 2 · L -4+20z^-1 · J";
pub const EEA_COL1: &str = "G -2, -1/2 · U (-13+3z^-1)/16 · L 1+z^-1 · D1 2 · U -(1+5z^-1)/4 · J";
pub const EEA_ROW0: &str = "G -18/169, -169/18 · L 144(3+13z^-1)/28561 · D1 2 · U 169(3-13z^-1)/144 · L (121-39z^-1)/169 · U -(5+z^-1)/4 · J";
pub const EEA_ROW1: &str = "G -2, -1/2 · U (3-13z^-1)/16 · D0 2 · L 1+z^-1 · U -(5+z^-1)/4 · J";

pub const SGDA_LEFT_THREE: &str =
    "G -2, -1/2 · U 3(1+z^-1)/16 · D0 1 · L -(5+z^-1) · U (1+z^-1)/4 · D0 1 · L -4 · J";
pub const SGDA_LINEAR_PHASE: &str =
    "G 2, 1/2 · U 3(1+z^-1)/16 · D0 1 · L -(1+z^-1) · D1 1 · U -(1+z^-1)/4 · J";
pub const SGDA_RIGHT_THREE: &str =
    "G -2, -1/2 · L 16/3 · D1 1 · U -3(1+z^-1)/16 · L (13-3z^-1)/3 · D1 1 · U -(1+z^-1)/4 · J";

pub const SCHEMA_COL0: &str = "(L,0,0,0; L,0,1,0; L,0,0,0)";
pub const SCHEMA_COL1: &str = "(L,0,0,{0,1}; L,0,1,1)";
pub const SCHEMA_ROW0: &str = "(R,0,0,0; R,0,1,0; R,0,0,0)";
pub const SCHEMA_ROW1: &str = "(R,0,0,{0,1}; R,{0,1,2},1,1)";
pub const SCHEMA_LEFT_THREE: &str = "(L,1,0,{0,1}; L,0,1,0; L,{0,1},0,0)";
pub const SCHEMA_LINEAR_PHASE: &str = "(L,1,0,{0,1}; L,{0,1},1,1)";
pub const SCHEMA_RIGHT_THREE: &str = "(R,1,0,{0,1}; R,0,1,0; R,{0,1},0,0)";

/// (schema, signature, factors) for every left degree-lifting factorization
/// of Daub(4,4).
pub const DAUB44_TABLE: [(&str, &str, &str); 8] = [
    (
        "(L,0,0,{0,1}; L,{0,1},1,0)",
        "[{0,1}; 1,0; 1 : 0]",
        "G (√3-1)/2, 1+√3 · U -1 · L (2-√3-z^-1√3)/4 · D1 1 · U √3",
    ),
    (
        "(L,0,0,{0,1}; L,{0,1},1,1)",
        "[{0,1}; 1,1; 0 : 0]",
        "G (3-√3)/2, -(3+√3)/3 · U 1/3 · L (-6+3√3-z^-1√3)/4 · D1 1 · U √3/3 · J",
    ),
    (
        "(L,0,1,{0,1}; L,{0,1},0,0)",
        "[{0,1}; 1,0; 1 : 1]",
        "G (1-√3)/2, 1+√3 · L 1 · U -(2+√3+z^-1√3)/4 · D0 1 · L √3 · J",
    ),
    (
        "(L,0,1,{0,1}; L,{0,1},0,1)",
        "[{0,1}; 1,1; 0 : 1]",
        "G (3-√3)/6, 3+√3 · L -1/3 · U (6+3√3-z^-1√3)/4 · D0 1 · L √3/3",
    ),
    (
        "(L,1,0,{0,1}; L,0,1,0)",
        "[{0,1}; 0,0; 1 : 0]",
        "G (3+√3)/2, (3-√3)/3 · U 1/3 · D0 1 · L (√3-z^-1(6+3√3))/4 · U -√3/3",
    ),
    (
        "(L,1,0,{0,1}; L,0,1,1)",
        "[{0,1}; 0,1; 0 : 0]",
        "G -(1+√3)/2, √3-1 · U -1 · D0 1 · L (√3+z^-1(2+√3))/4 · U -√3 · J",
    ),
    (
        "(L,1,1,{0,1}; L,0,0,0)",
        "[{0,1}; 0,0; 1 : 1]",
        "G (3+√3)/6, √3-3 · L -1/3 · D1 1 · U (√3+z^-1(6-3√3))/4 · L -√3/3 · J",
    ),
    (
        "(L,1,1,{0,1}; L,0,0,1)",
        "[{0,1}; 0,1; 0 : 1]",
        "G (1+√3)/2, √3-1 · L 1 · D1 1 · U (√3-z^-1(2-√3))/4 · L -√3",
    ),
];
