function pack(input) {
  const box = { data: input };
  return `<section>${box}</section>`;
}
module.exports = pack;
