//! Writes a multi-band raster and a class map to disk, reads them back and renders a PPM.

use landcover_svm::data_io::{
    data_path, read_class_raster, read_raster, render_ppm, write_class_raster, write_raster,
    ClassPalette, ClassRaster, Raster,
};
use landcover_svm::ClassTable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("landcover-svm-raster-io");
    std::fs::create_dir_all(&dir)?;

    let (rows, cols, bands) = (4, 5, 3);
    let data: Vec<f32> = (0..rows * cols * bands).map(|i| i as f32 * 0.25).collect();
    let raster = Raster::new(rows, cols, bands, data)?.with_nodata(Some(-9999.0));
    let header = dir.join("scene.hdr");
    write_raster(&raster, &header)?;
    let back = read_raster(&header)?;
    println!(
        "{} -> {}×{}×{}, identical: {}",
        data_path(&header).display(),
        back.rows(),
        back.cols(),
        back.bands(),
        back == raster
    );
    println!("{}", std::fs::read_to_string(&header)?);

    let classes = ClassTable::new(["water", "built-up"])?;
    let values = (0..rows * cols).map(|i| (i % 3) as u8).collect();
    let map = ClassRaster::new(rows, cols, values, classes.clone())?;
    let map_header = dir.join("map.hdr");
    write_class_raster(&map, &map_header)?;
    println!(
        "class map identical: {}",
        read_class_raster(&map_header)? == map
    );

    let ppm = dir.join("map.ppm");
    render_ppm(&map, &ClassPalette::default_for(&classes), &ppm)?;
    println!("rendered {}", ppm.display());
    Ok(())
}
