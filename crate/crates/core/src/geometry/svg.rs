//! Deterministic SVG rendering: originals as filled squares, added accesses
//! as circles, one grid line per row and column.

use super::{Origin, PointSet};

const CELL: usize = 16;
const MARGIN: usize = 10;

/// Renders the point set on its grid. Output is byte-for-byte deterministic
/// for a given set: points are emitted in coordinate order.
pub fn render_svg(s: &PointSet) -> String {
    let n = s.n();
    let side = 2 * MARGIN + CELL * n;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side}\" height=\"{side}\" \
         viewBox=\"0 0 {side} {side}\">\n"
    ));

    for i in 0..=n {
        let at = MARGIN + i * CELL;
        out.push_str(&format!(
            "  <line x1=\"{at}\" y1=\"{MARGIN}\" x2=\"{at}\" y2=\"{}\" \
             stroke=\"#cbd5e0\" stroke-width=\"1\"/>\n",
            side - MARGIN
        ));
        out.push_str(&format!(
            "  <line x1=\"{MARGIN}\" y1=\"{at}\" x2=\"{}\" y2=\"{at}\" \
             stroke=\"#cbd5e0\" stroke-width=\"1\"/>\n",
            side - MARGIN
        ));
    }

    let mut pts = s.points().to_vec();
    pts.sort_unstable();
    for p in pts {
        // Key 0 sits at the bottom of the picture.
        let cx = MARGIN + p.x as usize * CELL + CELL / 2;
        let cy = side - (MARGIN + p.y as usize * CELL + CELL / 2);
        match p.origin {
            Origin::Original => {
                let half = CELL * 3 / 8;
                out.push_str(&format!(
                    "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#2b6cb0\"/>\n",
                    cx - half,
                    cy - half,
                    2 * half,
                    2 * half
                ));
            }
            Origin::Added => {
                out.push_str(&format!(
                    "  <circle cx=\"{cx}\" cy=\"{cy}\" r=\"{}\" fill=\"#c53030\"/>\n",
                    CELL / 4
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{plot, satisfy_mergesort};
    use crate::permutation::gen_bit_reversal;

    fn count(haystack: &str, needle: &str) -> usize {
        haystack.matches(needle).count()
    }

    #[test]
    fn empty_set_renders() {
        let svg = render_svg(&PointSet::empty(0));
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(count(&svg, "<rect"), 0);
        assert_eq!(count(&svg, "<circle"), 0);
    }

    #[test]
    fn plot_renders_one_square_per_column() {
        let svg = render_svg(&plot(&gen_bit_reversal(8).unwrap()));
        assert_eq!(count(&svg, "<rect"), 8);
        assert_eq!(count(&svg, "<circle"), 0);
    }

    #[test]
    fn satisfied_set_mark_count_matches() {
        let s = satisfy_mergesort(&plot(&gen_bit_reversal(8).unwrap()));
        let svg = render_svg(&s);
        assert_eq!(count(&svg, "<rect") + count(&svg, "<circle"), s.len());
        // Deterministic output.
        assert_eq!(svg, render_svg(&s));
    }
}
