fn main() {
    println!("cmlab");
}
