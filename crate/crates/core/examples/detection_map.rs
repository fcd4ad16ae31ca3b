//! Detection probability over a 4 m × 3 m floor around a 3 m link, printed
//! as a coarse character map.

use rss_reflect::energy::ChannelSet;
use rss_reflect::model::{LinkGeometry, Point};
use rss_reflect::spatial::{pd_map, GridSpec};

fn main() -> rss_reflect::Result<()> {
    let geom = LinkGeometry::new(Point::new(0.0, 0.0), Point::new(3.0, 0.0))?;
    let grid = GridSpec::new((-0.5, 3.5), (-1.5, 1.5), 0.1)?;
    let map = pd_map(&geom, &grid, 0.35, 3.0, &ChannelSet::default(), 0.5, 6e-6)?;
    for j in (0..map.ny).rev() {
        let line: String = (0..map.nx)
            .map(|i| match map.cell(i, j).pd {
                p if p > 0.95 => '#',
                p if p > 0.5 => '+',
                p if p > 0.05 => '.',
                _ => ' ',
            })
            .collect();
        println!("{line}");
    }
    println!("P_d > 0.95 on {:.1}% of valid cells", 100.0 * map.coverage(0.95));
    Ok(())
}
