use std::fmt::Write as _;

use euclid_core::{parse_problem, serialize_problem, ParseErrorKind, Span};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn real(rng: &mut impl Rng) -> f64 {
    (rng.gen_range(-50_000..=50_000) as f64) / 1000.0
}

/// A random well-formed document using every statement form.
fn generate(rng: &mut impl Rng) -> String {
    let mut doc = String::new();
    let _ = writeln!(doc, "maxdepth {}", rng.gen_range(0..12));
    let mut labels: Vec<String> = Vec::new();
    let mut next = 0;
    for section in ["[initial]", "[goal]"] {
        let _ = writeln!(doc, "{section}");
        for _ in 0..rng.gen_range(0..4) {
            let l = format!("p{next}");
            next += 1;
            let _ = writeln!(doc, "point {l} {} {}", real(rng), real(rng));
            labels.push(l);
        }
        for _ in 0..rng.gen_range(0..4) {
            let l = format!("k{next}");
            next += 1;
            let pick = |rng: &mut dyn rand::RngCore| -> Option<(String, String)> {
                if labels.len() < 2 {
                    return None;
                }
                let i = rng.gen_range(0..labels.len());
                let j = (i + rng.gen_range(1..labels.len())) % labels.len();
                Some((labels[i].clone(), labels[j].clone()))
            };
            match rng.gen_range(0..4) {
                0 => match pick(rng) {
                    Some((a, b)) => {
                        let _ = writeln!(doc, "line {l} through {a} {b}");
                    }
                    None => continue,
                },
                1 => match pick(rng) {
                    Some((a, b)) => {
                        let _ = writeln!(doc, "circle {l} center {a} through {b}");
                    }
                    None => continue,
                },
                2 => {
                    let _ = writeln!(doc, "line {l} coeffs {} {} {}", real(rng), real(rng) + 0.5, real(rng));
                }
                _ => {
                    let _ = writeln!(doc, "circle {l} params {} {} {}", real(rng), real(rng), rng.gen_range(1..40_000) as f64 / 1000.0);
                }
            }
        }
    }
    doc
}

#[test]
fn generated_documents_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut checked = 0;
    while checked < 1_000 {
        let doc = generate(&mut rng);
        let p1 = match parse_problem(&doc) {
            Ok(d) => d.problem,
            // Random coefficients can collide with a through-defined primitive.
            Err(e) if e.kind == ParseErrorKind::DegenerateDefinition => continue,
            Err(e) => panic!("{}\n{doc}", e.render(&doc)),
        };
        let text = serialize_problem(&p1);
        let p2 = parse_problem(&text).unwrap_or_else(|e| panic!("{}", e.render(&text))).problem;
        assert!(p1.structurally_eq(&p2), "{doc}\n---\n{text}");
        checked += 1;
    }
}

#[test]
fn malformed_documents_point_at_the_fault() {
    use ParseErrorKind::*;
    let cases: &[(&str, ParseErrorKind, (usize, usize, usize))] = &[
        ("", Syntax, (1, 1, 1)),
        ("[initial]\npoint A 0 0\n", Syntax, (1, 1, 9)),
        ("maxdepth\n", Syntax, (1, 1, 8)),
        ("maxdepth -1\n", Syntax, (1, 10, 2)),
        ("maxdepth 2\nmaxdepth 3\n", Syntax, (2, 1, 8)),
        ("maxdepth 2\n[initial]\npoint 9A 0 0\n", Syntax, (3, 7, 2)),
        ("maxdepth 2\n[initial]\npoint A 0\n", Syntax, (3, 9, 1)),
        ("maxdepth 2\n[initial]\npoint A 1e 0\n", Syntax, (3, 9, 2)),
        ("maxdepth 2\n[initial]\npoint A nan 0\n", Syntax, (3, 9, 3)),
        ("maxdepth 2\n[initial]\nline l via A B\n", Syntax, (3, 8, 3)),
        ("maxdepth 2\n[initial]\npoint A 0 0\npoint B 1 0\ncircle c center A around B\n", Syntax, (5, 19, 6)),
        ("maxdepth 2\n[initial]\npoint A 0 0\npoint A 1 1\n", DuplicateLabel, (4, 7, 1)),
        ("maxdepth 2\n[initial]\npoint A 0 0\n[goal]\ncircle A params 0 0 1\n", DuplicateLabel, (5, 8, 1)),
        ("maxdepth 2\n[initial]\npoint A 0 0\nline l through A Q\n", UnknownReference, (4, 18, 1)),
        ("maxdepth 2\n[initial]\npoint A 0 0\nline l through A m\ncircle m params 0 0 1\n", UnknownReference, (4, 18, 1)),
        ("maxdepth 2\n[initial]\nline l through A B\n[goal]\npoint A 0 0\npoint B 1 0\n", UnknownReference, (3, 16, 1)),
        ("maxdepth 2\n[initial]\npoint A 0 0\npoint B 0 0\n", DegenerateDefinition, (4, 7, 1)),
        ("maxdepth 2\n[initial]\npoint A 1 1\nline l through A A\n", DegenerateDefinition, (4, 18, 1)),
        ("maxdepth 2\n[initial]\npoint A 1 1\ncircle c center A through A\n", DegenerateDefinition, (4, 27, 1)),
        ("maxdepth 2\n[initial]\nline l coeffs 0 0 3\n", DegenerateDefinition, (3, 15, 5)),
        ("maxdepth 2\n[initial]\ncircle c params 1 1 0\n", DegenerateDefinition, (3, 17, 5)),
        ("maxdepth 2\n[initial]\ncircle c params 1 1 -2\n", DegenerateDefinition, (3, 17, 6)),
    ];
    for (doc, kind, (line, col, len)) in cases {
        let e = parse_problem(doc).expect_err(doc);
        assert_eq!((e.kind, e.span), (*kind, Span::new(*line, *col, *len)), "{}", e.render(doc));
    }
}
