//! Value, surprise and suspense along the play's path in Game II. Prints the
//! CSV table; pass a directory to also write `shape.svg` and `shape.json`.

use storygame::narrative::fixtures::actual_story_game2;
use storygame::narrative::{export_shape, romeo_juliet_game2, shape_curve, story_path, ShapeFormat};
use storygame::qre::{trace_lle, LambdaSchedule, TraceOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = romeo_juliet_game2();
    let sigma = trace_lle(&g, &LambdaSchedule::default(), &TraceOptions::default())?.profile;
    let series = shape_curve(&g, &sigma, &story_path(&g, &actual_story_game2())?)?;
    print!("{}", String::from_utf8(export_shape(&series, ShapeFormat::Csv))?);
    println!("total surprise {:?}", series.total_surprise());
    println!("total suspense {:?}", series.total_suspense());
    if let Some(dir) = std::env::args().nth(1) {
        let dir = std::path::Path::new(&dir);
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("shape.svg"), export_shape(&series, ShapeFormat::Svg))?;
        std::fs::write(dir.join("shape.json"), export_shape(&series, ShapeFormat::Json))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
