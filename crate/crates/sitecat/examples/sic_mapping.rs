//! Generalize NAICS codes to the 21 top-level categories and map legacy
//! SIC codes through a crosswalk.
//!
//! ```sh
//! cargo run --example sic_mapping
//! ```

use sitecat::taxonomy::{parse_crosswalk, CategoryCode, Taxonomy};

fn main() {
    let taxonomy = Taxonomy::new();

    println!("the {} top-level categories:", taxonomy.top_levels().len());
    for (code, name) in taxonomy.top_levels() {
        println!("  {:<6} {}", code.as_str(), name);
    }
    println!();

    for raw in ["311119", "4521", "51", "48-49"] {
        let code = CategoryCode::new(raw).unwrap();
        let top = taxonomy.generalize(&code).unwrap();
        println!("generalize({raw}) = {top}");
    }
    println!();

    // crosswalk files are plain text, one `SIC,NAICS` pair per line
    let crosswalk = parse_crosswalk(
        "# software publishers under the old scheme\n\
         7372,511210\n\
         7372,334611\n\
         # metal mining\n\
         1000,212210\n\
         1000,213114\n",
    )
    .unwrap();
    for sic in ["7372", "1000", "9999"] {
        let tops = crosswalk.map_sic(&taxonomy, sic);
        let names: Vec<String> = tops.iter().map(|c| c.to_string()).collect();
        println!("SIC {sic} -> {{{}}}", names.join(", "));
    }
}
