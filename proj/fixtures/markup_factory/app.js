function linkTagtj1(tok) {
  const href = tok.meta.attrs.href;
  return `<a href="${href}">link</a>`;
}
function textTagtj1(tok) {
  const body = tok.body;
  return `<span>${body}</span>`;
}
module.exports = (function () {
  const htmlify = { link: linkTagtj1, text: textTagtj1 };
  function renderToken(tok) {
    const fn = htmlify[tok.kind];
    return fn(tok);
  }
  function render(input) {
    const tok = { kind: 'link', body: input, meta: { attrs: { href: input } } };
    return renderToken(tok);
  }
  return { render: render };
})();
