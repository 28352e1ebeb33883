use graysynth_core::glyph::{rasterize, FontFace, TextStyle};

fn main() {
    let mut args = std::env::args().skip(1);
    let font = args.next().expect("font path");
    let word = args.next().unwrap_or_else(|| "hello".into());
    let height: u32 = args.next().map_or(32, |h| h.parse().unwrap());
    let rotation: f64 = args.next().map_or(0.0, |r| r.parse().unwrap());
    let face = FontFace::from_bytes(std::fs::read(&font).unwrap(), "dump").unwrap();
    let style = TextStyle {
        font_id: 0,
        pixel_height: height,
        rotation_deg: rotation,
    };
    print!("{}", rasterize(&face, &word, &style).unwrap().to_ascii());
}
