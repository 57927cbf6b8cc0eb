from tutorstack.kb.extract import extract_text


class TestExtractText:
    def test_inline_markup_collapses(self):
        page = extract_text(b"<p>Hello <b>world</b></p>")
        assert page.text == "Hello world"

    def test_script_dropped_heading_kept(self):
        page = extract_text(b"<script>x=1</script><h1>Rank</h1>")
        assert page.text == "# Rank"
        assert page.title == "Rank"

    def test_figcaption_retained(self):
        page = extract_text(b"<p>Before</p><figcaption>Fig 1: a matrix</figcaption>")
        assert "Fig 1: a matrix" in page.text

    def test_track_label_retained(self):
        page = extract_text(b'<p><track label="lecture subtitles" src="x.vtt"/>Video intro</p>')
        assert "lecture subtitles" in page.text

    def test_caption_class_retained(self):
        page = extract_text(b'<p>Body</p><span class="video-caption">Eigenvalues explained</span>')
        assert "Eigenvalues explained" in page.text

    def test_nav_and_footer_dropped(self):
        html = b"""
        <nav><a href="/">Home</a> | <a href="/about">About</a></nav>
        <p>Real content here.</p>
        <footer>Copyright 2024</footer>
        """
        page = extract_text(html)
        assert page.text == "Real content here."

    def test_nested_drop_containers(self):
        html = b"<footer><div><p>junk</p></div></footer><p>keep</p>"
        assert extract_text(html).text == "keep"

    def test_heading_levels(self):
        html = b"<h2>Sub</h2><h6>Tiny</h6>"
        page = extract_text(html)
        assert page.text == "## Sub\n\n###### Tiny"

    def test_list_items_prefixed(self):
        html = b"<ul><li>alpha</li><li>beta vector</li></ul>"
        page = extract_text(html)
        assert page.text == "- alpha\n- beta vector"

    def test_paragraphs_blank_line_separated(self):
        html = b"<p>First paragraph.</p><p>Second one.</p>"
        assert extract_text(html).text == "First paragraph.\n\nSecond one."

    def test_title_tag_preferred_over_h1(self):
        html = b"<title>Doc Title</title><h1>Heading</h1>"
        page = extract_text(html)
        assert page.title == "Doc Title"
        assert page.text == "# Heading"

    def test_empty_input(self):
        page = extract_text(b"")
        assert page.title == "" and page.text == ""

    def test_tag_free_input_is_empty(self):
        page = extract_text(b"just some plain text, no markup")
        assert page.title == "" and page.text == ""

    def test_invalid_utf8_is_replaced(self):
        page = extract_text(b"<p>caf\xff</p>")
        assert page.text.startswith("caf")

    def test_whitespace_collapsed(self):
        html = b"<p>lots   of\n   spacing\t here</p>"
        assert extract_text(html).text == "lots of spacing here"

    def test_idempotent_on_own_output(self):
        html = b"""
        <title>Linear Algebra</title>
        <script>void(0)</script>
        <h1>Matrices</h1>
        <p>A matrix is a grid   of numbers.</p>
        <ul><li>rows</li><li>columns</li></ul>
        <h3>Rank</h3>
        <p>The rank counts independent rows.</p>
        """
        first = extract_text(html).text
        # render the output trivially back into markup and re-extract
        again = extract_text(f"<body>{first}</body>".encode()).text
        assert again == first
