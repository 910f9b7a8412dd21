//! SVG rendering of a region set. A pure function of the regions:
//! deterministic colors from a hash of the owner id, y flipped so larger
//! y draws upward.

use std::fmt::Write as _;

use crate::sweep::VisibleRegion;

fn owner_color(owner: i64) -> String {
    if owner < 0 {
        return "#222222".to_string();
    }
    // Splitmix-style scramble for well-spread hues.
    let mut h = owner as u64 ^ 0x9e3779b97f4a7c15;
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58476d1ce4e5b9);
    h ^= h >> 27;
    let hue = (h % 360) as f64;
    let sat = 55 + (h >> 9) % 30;
    let light = 45 + (h >> 17) % 20;
    format!("hsl({hue},{sat}%,{light}%)")
}

pub fn render(regions: &[VisibleRegion]) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (0i64, 1i64, 0i64, 1i64);
    if let Some(first) = regions.first() {
        x0 = first.x_start;
        x1 = first.x_end;
        y0 = first.y_low;
        y1 = first.y_high;
        for r in regions {
            x0 = x0.min(r.x_start);
            x1 = x1.max(r.x_end);
            y0 = y0.min(r.y_low);
            y1 = y1.max(r.y_high);
        }
    }
    let (w, h) = (x1 - x0, y1 - y0);
    let margin = (w.max(h) / 40).max(1);
    let mut s = String::new();
    let _ = writeln!(
        s,
        concat!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}" "#,
            r#"preserveAspectRatio="xMidYMid meet">"#
        ),
        x0 - margin,
        -y1 - margin,
        w + 2 * margin,
        h + 2 * margin,
    );
    let _ = writeln!(
        s,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#0b0b0e"/>"##,
        x0 - margin,
        -y1 - margin,
        w + 2 * margin,
        h + 2 * margin
    );
    let stroke = (w.max(h) as f64 / 600.0).max(0.05);
    for r in regions {
        let _ = writeln!(
            s,
            r##"<rect x="{}" y="{}" width="{}" height="{}" fill="{}" stroke="#000" stroke-width="{:.3}"/>"##,
            r.x_start,
            -r.y_high,
            r.x_end - r.x_start,
            r.y_high - r.y_low,
            owner_color(r.owner),
            stroke,
        );
    }
    s.push_str("</svg>\n");
    s
}
